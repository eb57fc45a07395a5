#include "egdlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace egdlab::spectral {

namespace {

using Columns = std::vector<std::vector<double>>;

constexpr int kMaxSweeps = 80;
constexpr double kSignEps = 1e-12;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Columns to_columns(const DenseMatrix& a) {
    Columns cols(a.cols(), std::vector<double>(a.rows()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) cols[j][i] = a(i, j);
    return cols;
}

// Householder QR of a tall matrix held as columns. On return `cols` holds R
// (p x p, columns truncated to length p) and `q` the thin m x p factor.
void householder_qr(Columns& cols, Columns& q) {
    const std::size_t p = cols.size();
    const std::size_t m = cols.front().size();
    Columns reflectors(p);
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double>& x = cols[k];
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm = std::hypot(norm, x[i]);
        std::vector<double> v(m - k, 0.0);
        if (norm > 0.0) {
            const double alpha = x[k] >= 0.0 ? -norm : norm;
            for (std::size_t i = k; i < m; ++i) v[i - k] = x[i];
            v[0] -= alpha;
            const double vnorm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
            if (vnorm > 0.0) {
                for (double& e : v) e /= vnorm;
            }
            x[k] = alpha;
            for (std::size_t i = k + 1; i < m; ++i) x[i] = 0.0;
            const auto first = static_cast<std::ptrdiff_t>(k + 1);
            const auto last = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(static) if ((m - k) * (p - k) > 20000)
            for (std::ptrdiff_t j = first; j < last; ++j) {
                std::vector<double>& c = cols[static_cast<std::size_t>(j)];
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += v[i - k] * c[i];
                s *= 2.0;
                for (std::size_t i = k; i < m; ++i) c[i] -= s * v[i - k];
            }
        }
        reflectors[k] = std::move(v);
    }
    q.assign(p, std::vector<double>(m, 0.0));
    const auto pp = static_cast<std::ptrdiff_t>(p);
#pragma omp parallel for schedule(static) if (m * p * p > 20000)
    for (std::ptrdiff_t jj = 0; jj < pp; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        std::vector<double>& c = q[j];
        c[j] = 1.0;
        for (std::size_t kk = p; kk-- > 0;) {
            const std::vector<double>& v = reflectors[kk];
            double s = 0.0;
            for (std::size_t i = kk; i < m; ++i) s += v[i - kk] * c[i];
            if (s == 0.0) continue;
            s *= 2.0;
            for (std::size_t i = kk; i < m; ++i) c[i] -= s * v[i - kk];
        }
    }
    for (auto& c : cols) c.resize(p);
}

// Returns false when the pair was already orthogonal to tolerance, or when
// either column is below the noise floor (squared norm <= floor2).
bool rotate_pair(std::vector<double>& wi, std::vector<double>& wj, std::vector<double>& vi, std::vector<double>& vj,
                 double tol, double floor2) {
    const double alpha = dot(wi, wi);
    const double beta = dot(wj, wj);
    if (alpha <= floor2 || beta <= floor2) return false;
    const double gamma = dot(wi, wj);
    if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) return false;
    const double zeta = (beta - alpha) / (2.0 * gamma);
    const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = c * t;
    for (std::size_t k = 0; k < wi.size(); ++k) {
        const double a = wi[k];
        const double b = wj[k];
        wi[k] = c * a - s * b;
        wj[k] = s * a + c * b;
    }
    for (std::size_t k = 0; k < vi.size(); ++k) {
        const double a = vi[k];
        const double b = vj[k];
        vi[k] = c * a - s * b;
        vj[k] = s * a + c * b;
    }
    return true;
}

// One-sided (Hestenes) Jacobi with round-robin pair ordering. The pairs of a
// round touch disjoint columns, so they can run concurrently without changing
// the result.
void hestenes_jacobi(Columns& w, Columns& v, std::size_t rows, std::size_t cols_total) {
    const std::size_t p = w.size();
    v.assign(p, std::vector<double>(p, 0.0));
    for (std::size_t j = 0; j < p; ++j) v[j][j] = 1.0;
    if (p < 2) return;

    const double tol = std::max<double>(16.0, static_cast<double>(w.front().size())) *
                       std::numeric_limits<double>::epsilon();
    // Columns this small are round-off left over from a rank-deficient input;
    // they never become orthogonal to relative precision.
    double frob2 = 0.0;
    for (const auto& col : w) frob2 += dot(col, col);
    const double floor_norm = static_cast<double>(std::max(rows, p)) * std::numeric_limits<double>::epsilon();
    const double floor2 = floor_norm * floor_norm * frob2;
    const std::size_t slots = p + (p % 2);
    std::vector<std::size_t> ring(slots);
    std::iota(ring.begin(), ring.end(), std::size_t{0});
    const std::size_t half = slots / 2;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        std::size_t rotations = 0;
        for (std::size_t round = 0; round + 1 < slots; ++round) {
            const auto npairs = static_cast<std::ptrdiff_t>(half);
#pragma omp parallel for schedule(static) reduction(+ : rotations) if (p * p * w.front().size() > 200000)
            for (std::ptrdiff_t k = 0; k < npairs; ++k) {
                std::size_t a = ring[static_cast<std::size_t>(k)];
                std::size_t b = ring[slots - 1 - static_cast<std::size_t>(k)];
                if (a >= p || b >= p) continue;
                if (a > b) std::swap(a, b);
                if (rotate_pair(w[a], w[b], v[a], v[b], tol, floor2)) ++rotations;
            }
            // Circle method: slot 0 fixed, the rest rotate by one.
            std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
        }
        if (rotations == 0) return;
    }
    throw SvdConvergenceError(rows, cols_total, kMaxSweeps);
}

// Completes a set of orthonormal columns (some entries flagged missing) using
// Gram-Schmidt on the standard basis.
void complete_basis(Columns& u, const std::vector<bool>& missing) {
    const std::size_t n = u.front().size();
    std::size_t next_e = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!missing[j]) continue;
        while (next_e < n) {
            std::vector<double> cand(n, 0.0);
            cand[next_e++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t k = 0; k < u.size(); ++k) {
                    if (k == j || (missing[k] && k > j)) continue;
                    const double proj = dot(cand, u[k]);
                    for (std::size_t i = 0; i < n; ++i) cand[i] -= proj * u[k][i];
                }
            }
            const double nn = std::sqrt(dot(cand, cand));
            if (nn > 0.5) {
                for (double& e : cand) e /= nn;
                u[j] = std::move(cand);
                break;
            }
        }
    }
}

struct TallSvd {
    Columns u;  // r columns of length m
    std::vector<double> s;
    Columns v;  // r columns of length p
};

TallSvd svd_tall(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t p = a.cols();
    Columns w = to_columns(a);
    Columns q;
    const bool use_qr = m > p;
    if (use_qr) householder_qr(w, q);

    Columns vcols;
    hestenes_jacobi(w, vcols, a.rows(), a.cols());

    std::vector<double> s(p);
    for (std::size_t j = 0; j < p; ++j) s[j] = std::sqrt(dot(w[j], w[j]));

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });

    TallSvd out;
    out.s.resize(p);
    out.u.resize(p);
    out.v.resize(p);
    std::vector<bool> missing(p, false);
    for (std::size_t r = 0; r < p; ++r) {
        const std::size_t j = order[r];
        out.s[r] = s[j];
        out.v[r] = std::move(vcols[j]);
        if (s[j] > 0.0) {
            std::vector<double> col = w[j];
            for (double& e : col) e /= s[j];
            out.u[r] = std::move(col);
        } else {
            out.u[r].assign(w[j].size(), 0.0);
            missing[r] = true;
        }
    }
    if (std::any_of(missing.begin(), missing.end(), [](bool b) { return b; })) complete_basis(out.u, missing);

    if (use_qr) {
        Columns full(p, std::vector<double>(m, 0.0));
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t k = 0; k < p; ++k) {
                const double c = out.u[r][k];
                if (c == 0.0) continue;
                for (std::size_t i = 0; i < m; ++i) full[r][i] += c * q[k][i];
            }
        }
        out.u = std::move(full);
    }
    return out;
}

DenseMatrix columns_to_matrix(const Columns& c, std::size_t len) {
    DenseMatrix out(len, c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i < len; ++i) out(i, j) = c[j][i];
    return out;
}

void check_input(const DenseMatrix& m, const char* what) {
    if (m.empty()) throw ShapeError(std::string(what) + ": empty matrix");
    if (!m.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite entry in " + m.shape_string());
}

bool is_zero(const DenseMatrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double x) { return x == 0.0; });
}

}  // namespace

SvdConvergenceError::SvdConvergenceError(std::size_t r, std::size_t c, int sweeps)
    : std::runtime_error("svd: Jacobi iteration did not converge within " + std::to_string(sweeps) +
                         " sweeps for a " + std::to_string(r) + "x" + std::to_string(c) + " matrix"),
      rows(r),
      cols(c) {}

SVDResult svd(const DenseMatrix& m, double rel_tol) {
    check_input(m, "svd");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("svd: rel_tol must lie in (0, 1)");

    const bool wide = m.rows() < m.cols();
    TallSvd t = wide ? svd_tall(m.transposed()) : svd_tall(m);
    if (wide) std::swap(t.u, t.v);

    // Sign convention on the left vectors; the right vectors follow.
    for (std::size_t r = 0; r < t.u.size(); ++r) {
        auto it = std::find_if(t.u[r].begin(), t.u[r].end(), [](double x) { return std::abs(x) > kSignEps; });
        if (it != t.u[r].end() && *it < 0.0) {
            for (double& e : t.u[r]) e = -e;
            for (double& e : t.v[r]) e = -e;
        }
    }

    SVDResult out;
    out.u = columns_to_matrix(t.u, m.rows());
    out.v = columns_to_matrix(t.v, m.cols());
    out.s = std::move(t.s);
    out.cutoff = out.s.front() > 0.0 ? rel_tol * out.s.front() : 0.0;
    out.numerical_rank = static_cast<std::size_t>(
        std::count_if(out.s.begin(), out.s.end(), [&](double x) { return x > out.cutoff; }));
    return out;
}

namespace {

// sum over retained modes of f(s_j) * left_j * right_j^T
DenseMatrix weighted_outer(const DenseMatrix& left, const std::vector<double>& weights, const DenseMatrix& right) {
    DenseMatrix out(left.rows(), right.rows());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        double* orow = out.row(i).data();
        for (std::size_t r = 0; r < weights.size(); ++r) {
            const double c = left(i, r) * weights[r];
            if (c == 0.0) continue;
            for (std::size_t j = 0; j < right.rows(); ++j) orow[j] += c * right(j, r);
        }
    }
    return out;
}

template <class F>
std::vector<double> retained_weights(const SVDResult& d, F f) {
    std::vector<double> w(d.numerical_rank);
    for (std::size_t r = 0; r < d.numerical_rank; ++r) w[r] = f(d.s[r]);
    return w;
}

}  // namespace

DenseMatrix egd_from_svd(const SVDResult& d) {
    return weighted_outer(d.u, retained_weights(d, [](double) { return 1.0; }), d.v);
}

DenseMatrix egd_transform(const DenseMatrix& g, double rel_tol) {
    check_input(g, "egd_transform");
    if (is_zero(g)) return DenseMatrix(g.rows(), g.cols());
    return egd_from_svd(svd(g, rel_tol));
}

DenseMatrix column_normalize(const DenseMatrix& g) {
    check_input(g, "column_normalize");
    DenseMatrix out = g;
    std::vector<double> norms(g.cols(), 0.0);
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) norms[j] = std::hypot(norms[j], g(i, j));
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            if (norms[j] > 0.0) out(i, j) /= norms[j];
    return out;
}

DenseMatrix gram_inv_sqrt(const DenseMatrix& g, double rel_tol) {
    check_input(g, "gram_inv_sqrt");
    if (is_zero(g)) return DenseMatrix(g.rows(), g.rows());
    const SVDResult d = svd(g, rel_tol);
    return weighted_outer(d.u, retained_weights(d, [](double s) { return 1.0 / s; }), d.u);
}

DenseMatrix gram_sqrt(const DenseMatrix& g, double rel_tol) {
    check_input(g, "gram_sqrt");
    if (is_zero(g)) return DenseMatrix(g.rows(), g.rows());
    const SVDResult d = svd(g, rel_tol);
    return weighted_outer(d.u, retained_weights(d, [](double s) { return s; }), d.u);
}

DenseMatrix ngd_transform(const DenseMatrix& g, double rel_tol) {
    check_input(g, "ngd_transform");
    if (is_zero(g)) return DenseMatrix(g.rows(), g.cols());
    const SVDResult d = svd(g, rel_tol);
    return weighted_outer(d.u, retained_weights(d, [](double s) { return 1.0 / s; }), d.v);
}

SpectrumDiagnostics spectrum_from_svd(const SVDResult& d, double frobenius_norm) {
    SpectrumDiagnostics out;
    out.singular_values = d.s;
    out.frobenius_norm = frobenius_norm;
    out.numerical_rank = d.numerical_rank;
    if (d.numerical_rank > 0) out.condition_number = d.s.front() / d.s[d.numerical_rank - 1];
    return out;
}

SpectrumDiagnostics spectrum(const DenseMatrix& g, double rel_tol) {
    check_input(g, "spectrum");
    if (is_zero(g)) {
        SpectrumDiagnostics out;
        out.singular_values.assign(std::min(g.rows(), g.cols()), 0.0);
        return out;
    }
    return spectrum_from_svd(svd(g, rel_tol), g.frobenius_norm());
}

DenseMatrix pseudo_inverse(const DenseMatrix& m, double rel_tol) {
    check_input(m, "pseudo_inverse");
    if (is_zero(m)) return DenseMatrix(m.cols(), m.rows());
    const SVDResult d = svd(m, rel_tol);
    return weighted_outer(d.v, retained_weights(d, [](double s) { return 1.0 / s; }), d.u);
}

}  // namespace egdlab::spectral
