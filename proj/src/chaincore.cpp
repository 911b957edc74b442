#include "cubar/chaincore.hpp"

namespace cubar {

json Certificate::to_json() const {
  json j{{"identity", identity}, {"status", ok ? "ok" : "fail"}, {"terms", terms},
         {"structural", structural}, {"lattice", lattice}, {"residual", residual}};
  if (!constructible) j["constructible"] = false;
  if (!note.empty()) j["note"] = note;
  return j;
}

Certificate verify_dd_zero(const CubeExpr& T, const WeightVector& w, Exec mode) {
  Certificate cert;
  cert.identity = "thm1";
  const int n = T.arity(), L = w.L(), S = L + 1;
  if (n <= 1) {
    cert.note = "vacuous: the boundary vanishes in degree 0";
    return cert;
  }
  CubeExpr Tc = canonical(T);
  auto first = map_range<CubeExpr>(static_cast<std::size_t>(n * S), mode, [&](std::size_t q) {
    return canonical_face(Tc, L, static_cast<int>(q % S), static_cast<int>(q / S) + 1);
  });
  // term (j, i, p, k) = face(face(T, i, j), k, p) at index ((j−1)·S + i)·(n−1)·S + (p−1)·S + k
  const std::size_t inner = static_cast<std::size_t>((n - 1) * S);
  auto index = [&](int j, int i, int p, int k) {
    return static_cast<std::size_t>((j - 1) * S + i) * inner + static_cast<std::size_t>((p - 1) * S + k);
  };
  auto second = map_range<CubeExpr>(static_cast<std::size_t>(n * S) * inner, mode, [&](std::size_t q) {
    std::size_t r = q % inner;
    return canonical_face(first[q / inner], L, static_cast<int>(r % S), static_cast<int>(r / S) + 1);
  });
  cert.terms = static_cast<long>(second.size());

  auto coeff = [&](int j, int i, int p, int k) {
    Rat c = w[i].value() * w[k].value();
    return (j + p) % 2 ? Rat(-c) : c;
  };
  const Rat step = rat(1, 6 * L);
  CubeChain total(w.ring(), n - 2);
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= L; ++i)
      for (int p = 1; p <= n - 1; ++p)
        for (int k = 0; k <= L; ++k) {
          total.add_canonical(second[index(j, i, p, k)], coeff(j, i, p, k));
          if (j > p) continue;
          const CubeExpr& a = second[index(j, i, p, k)];
          const CubeExpr& b = second[index(p + 1, k, j, i)];
          bool cancels = w.ring().normalize(coeff(j, i, p, k) + coeff(p + 1, k, j, i)) == 0;
          if (cancels && a == b) {
            cert.structural += 2;
          } else if (cancels && maps_equal(a, b, step)) {
            cert.lattice += 2;
          } else {
            cert.residual.push_back(json{{"pair", {j, i, p, k}}, {"term", a.describe()}, {"partner", b.describe()}});
          }
        }
  for (const auto& [g, c] : total.terms())
    cert.residual.push_back(json{{"uncancelled", g.describe()}, {"coeff", to_string(c)}});
  cert.ok = cert.residual.empty();
  return cert;
}

CubeChain pushforward(const AffineMap& f, const CubeChain& u) {
  CubeChain out(u.ring(), u.degree());
  for (const auto& [g, c] : u.terms()) out.add(CubeExpr::push(f, g), c);
  return out;
}

}  // namespace cubar
