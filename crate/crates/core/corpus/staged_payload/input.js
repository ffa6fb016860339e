function order(productId) {
  $.post("https://api.shop.example/v1/orders", { productId: productId });
}
