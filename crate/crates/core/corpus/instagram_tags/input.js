function getPictureForTag(tag) {
  var url = "https://api.instagram.com/v1/tags/" + tag + "/media/recent";
  var settings = {
    url: url,
    type: "GET",
    data: { access_token: token }
  };
  sendRequest(settings);
}

function sendRequest(settings) {
  $.ajax(settings);
}
