function getPictureForTag(tag) {
  var url = "https://api.instagram.com/v1/tags/" + tag + "/media/recent";
  $.ajax({
    url: url,
    method: "POST",
    data: { access_token: token }
  });
}
