const API = "https://api.shop.example/v1";

function customers() {
  return fetch(`${API}/customers`);
}
