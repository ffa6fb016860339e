var V1 = "https://api.shop.example/v1";
var V2 = "https://api.shop.example/v2";

function search(term) {
  return $.get(V1 + "/search?q=" + encodeURIComponent(term));
}

function order(productId, n) {
  $.post(V1 + "/orders", { productId: productId, quantity: n });
}

function removeProduct(id) {
  return fetch(V2 + "/products/" + id, { method: "DELETE" });
}

function reviews(id) {
  $.ajax({ url: V2 + "/items/" + id + "/reviews", dataType: "json" });
}

function newCart(user) {
  return fetch(V2 + "/carts", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ owner: user.id })
  });
}
