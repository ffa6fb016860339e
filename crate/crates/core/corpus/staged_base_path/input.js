function product(id) {
  $.get("https://api.shop.example/v3/products/" + id);
}
