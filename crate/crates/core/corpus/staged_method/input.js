var base = "https://api.shop.example/v1/products/";

function updateProduct(id, fields) {
  $.ajax({
    url: base + id,
    type: "PUT",
    data: fields
  });
}
