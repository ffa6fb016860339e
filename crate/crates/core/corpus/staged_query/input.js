function search(term) {
  var opts = { page: 1 };
  $.get("https://api.shop.example/v1/search", opts, function (res) {
    show(res);
  });
}
