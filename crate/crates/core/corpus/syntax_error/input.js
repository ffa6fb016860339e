function broken( {
  return 1;
}

$.get("https://api.shop.example/v1/products");
