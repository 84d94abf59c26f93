#include "instlab/monad.hpp"

#include <cmath>

namespace ilab {

namespace {

template <class T>
Mat<T> random_nonzero_vec(Rng& rng, std::size_t n, long long span) {
  for (;;) {
    Mat<T> v = random_matrix<T>(rng, n, 1, span);
    if (!v.is_zero()) return v;
  }
}

template <class T>
std::size_t backend_rank(const Mat<T>& m) {
  if constexpr (is_exact_v<T>) return rank(m);
  else return rank_svd(m);
}

template <class T>
std::vector<Mat<T>> backend_kernel(const Mat<T>& m) {
  if constexpr (is_exact_v<T>) return kernel_basis(m);
  else return nullspace_svd(m);
}

}  // namespace

template <class T>
MonadCertificate<T> certify(const ATensor<T>& a, int e1_samples, std::uint64_t seed) {
  if (e1_samples < 1) throw InvalidInputError("certify: e1_samples must be >= 1");
  const int k = a.k;
  MonadCertificate<T> cert;
  cert.k = k;
  cert.e1_samples = e1_samples;

  SymForm<T> quad = monad_quadric(a);
  if constexpr (is_exact_v<T>) {
    cert.e2_exact = true;
    cert.e2_pass = quad.is_zero();
    cert.e2_residual = 0.0;
  } else {
    double na = frob_norm(a.vec());
    cert.e2_residual = frob_norm(quad.vec()) / std::max(1.0, na * na);
    cert.e2_pass = cert.e2_residual <= Config::get().tolerance;
  }

  Mat<T> flat = a.flat();
  std::size_t frank = backend_rank(flat);
  cert.e3_rank = backend_rank(symplectic_pairing(a));
  cert.h0K = static_cast<std::size_t>(a.h_dim()) - frank;

  Rng rng(seed);
  cert.e1_pass = true;
  for (int s = 0; s < e1_samples; ++s) {
    Mat<T> f = random_nonzero_vec<T>(rng, 4, 30);
    Mat<T> m = e1_matrix(a, f);
    if (backend_rank(m) < static_cast<std::size_t>(k)) {
      auto kb = backend_kernel(m);
      Mat<T> b = kb.empty() ? Mat<T>(static_cast<std::size_t>(k), 1) : kb.front();
      cert.e1_pass = false;
      cert.e1_witness = std::make_pair(f, b);
      break;
    }
  }
  return cert;
}

std::optional<InstantonSample<Rat>> generate_slice(int k, std::uint64_t seed, int e1_samples,
                                                   int max_draws) {
  if (k < 1 || k > 5) throw InvalidInputError("generate_slice: k must be in 1..5");
  ATensor<Rat> base = slice_base_tensor<Rat>(k);
  const int n = base.h_dim();

  // coefficient slots of the second block (the general k x (k+1) part)
  std::vector<std::size_t> qslots;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = k + 1; l < n; ++l)
        qslots.push_back(static_cast<std::size_t>((i * k + j) * n + l));

  Mat<Rat> dg = monad_quadric_diff(base);
  Mat<Rat> sub(dg.rows(), qslots.size());
  for (std::size_t c = 0; c < qslots.size(); ++c)
    for (std::size_t r = 0; r < dg.rows(); ++r) sub(r, c) = dg(r, qslots[c]);
  std::vector<Mat<Rat>> kern = kernel_basis(sub);
  if (kern.empty()) return std::nullopt;

  Rng rng(seed);
  for (int draw = 0; draw < max_draws; ++draw) {
    ATensor<Rat> a = base;
    bool nontrivial = false;
    std::vector<Rat> coeff(kern.size());
    for (std::size_t i = 0; i < kern.size(); ++i) {
      coeff[i] = Rat(static_cast<long>(rng.int_range(-9, 9)));
      if (sgn(coeff[i]) != 0) nontrivial = true;
    }
    if (!nontrivial) continue;
    for (std::size_t i = 0; i < kern.size(); ++i) {
      if (sgn(coeff[i]) == 0) continue;
      for (std::size_t c = 0; c < qslots.size(); ++c) a.a[qslots[c]] += coeff[i] * kern[i](c, 0);
    }
    if (!monad_quadric(a).is_zero())
      throw MathFindingError("generate_slice: kernel draw violates the quadric condition");
    MonadCertificate<Rat> cert = certify(a, e1_samples, rng.next_u64());
    if (cert.is_instanton()) {
      InstantonSample<Rat> s;
      s.a = std::move(a);
      s.certificate = std::move(cert);
      s.provenance = "slice-solve(seed=" + std::to_string(seed) + ",draw=" + std::to_string(draw) + ")";
      s.seed = seed;
      return s;
    }
  }
  return std::nullopt;
}

NewtonResult generate_newton(int k, std::uint64_t seed, int max_iter, int max_restarts,
                             const ATensor<CD>* start, int e1_samples) {
  if (k < 1 || k > 5) throw InvalidInputError("generate_newton: k must be in 1..5");
  NewtonResult out;
  Rng rng(seed);
  for (int restart = 0; restart <= max_restarts; ++restart) {
    ++out.restarts;
    ATensor<CD> a(k);
    if (start != nullptr && restart == 0) {
      a = *start;
    } else {
      for (CD& x : a.a) x = rng.complex_unit();
    }
    for (int iter = 0; iter <= max_iter; ++iter) {
      Mat<CD> r = monad_quadric(a).vec();
      double na = frob_norm(a.vec());
      double res = frob_norm(r);
      out.residual = res;
      if (res <= 1e-10 * std::max(na * na, 1e-12)) {
        out.iterations = iter;
        MonadCertificate<CD> cert = certify(a, e1_samples, rng.next_u64());
        if (cert.is_instanton()) {
          InstantonSample<CD> s;
          s.a = std::move(a);
          s.certificate = std::move(cert);
          s.provenance = "gauss-newton(seed=" + std::to_string(seed) +
                         ",iterations=" + std::to_string(iter) + ",residual=" + std::to_string(res) + ")";
          s.seed = seed;
          out.sample = std::move(s);
          return out;
        }
        break;  // converged to a non-instanton point; restart
      }
      if (iter == max_iter) break;
      Mat<CD> jac = monad_quadric_diff(a);
      Mat<CD> delta = lstsq_min_norm(jac, -r);
      ATensor<CD> step = ATensor<CD>::from_vec(k, delta);
      a = a + step;
    }
  }
  return out;
}

template <class T>
std::size_t h0_plane(const ATensor<T>& a, const Mat<T>& fstar) {
  std::vector<Mat<T>> basis = plane_basis(fstar);
  Mat<T> m = plane_restriction_matrix(a, basis);
  return static_cast<std::size_t>(a.h_dim()) - backend_rank(m);
}

template MonadCertificate<Rat> certify(const ATensor<Rat>&, int, std::uint64_t);
template MonadCertificate<Fp> certify(const ATensor<Fp>&, int, std::uint64_t);
template MonadCertificate<CD> certify(const ATensor<CD>&, int, std::uint64_t);
template std::size_t h0_plane(const ATensor<Rat>&, const Mat<Rat>&);
template std::size_t h0_plane(const ATensor<CD>&, const Mat<CD>&);

}  // namespace ilab
