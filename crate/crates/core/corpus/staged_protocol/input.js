function listProducts() {
  return $.getJSON("http://api.shop.example/v1/products");
}
