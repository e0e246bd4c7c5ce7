#include "tofslam/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include "tofslam/parallel.hpp"

namespace tofslam {

CsrLower::CsrLower(std::size_t dim) : dim_(dim) {
    if (dim_ > 0) {
        row_pointer_.push_back(0);
    }
}

void CsrLower::insert(std::size_t i, std::size_t j, double v) {
    if (finalized_) {
        throw SparseError("csr: insert after finalize");
    }
    if (i >= dim_ || j > i) {
        throw SparseError("csr: index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside the lower triangle");
    }
    if (i < open_row_) {
        throw SparseError("csr: row " + std::to_string(i) + " inserted after row " +
                          std::to_string(open_row_));
    }
    if (i == open_row_ && row_pointer_.back() > row_pointer_[i] && col_index_.back() >= j) {
        throw SparseError("csr: column " + std::to_string(j) + " out of order in row " +
                          std::to_string(i));
    }
    while (open_row_ < i) {
        row_pointer_.push_back(row_pointer_.back());
        ++open_row_;
    }
    values_.push_back(v);
    col_index_.push_back(j);
    row_pointer_.back() = values_.size();
}

void CsrLower::finalize() {
    while (row_pointer_.size() < dim_ + 1) {
        row_pointer_.push_back(values_.size());
    }
    open_row_ = dim_;
    finalized_ = true;
}

void CsrLower::require_row(std::size_t i) const {
    if (i + 1 >= row_pointer_.size()) {
        throw SparseError("csr: row " + std::to_string(i) + " not written yet");
    }
}

std::optional<std::size_t> CsrLower::find(std::size_t i, std::size_t j) const {
    if (j > i || i + 1 >= row_pointer_.size()) {
        return std::nullopt;
    }
    const auto first = col_index_.begin() + static_cast<std::ptrdiff_t>(row_pointer_[i]);
    const auto last = col_index_.begin() + static_cast<std::ptrdiff_t>(row_pointer_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - col_index_.begin());
}

void CsrLower::add_to(std::size_t i, std::size_t j, double v) {
    require_row(std::max(i, j));
    const auto slot = find(std::max(i, j), std::min(i, j));
    if (!slot) {
        throw SparseError("csr: no slot at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    values_[*slot] += v;
}

double CsrLower::at(std::size_t i, std::size_t j) const {
    const auto slot = find(std::max(i, j), std::min(i, j));
    return slot ? values_[*slot] : 0.0;
}

void CsrLower::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void write_triplets(std::ostream& os, const CsrLower& m) {
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i + 1 < m.row_pointer().size(); ++i) {
        for (std::size_t k = m.row_begin(i); k < m.row_end(i); ++k) {
            os << i << ' ' << m.col_index()[k] << ' ' << m.values()[k] << '\n';
        }
    }
    os.precision(old_precision);
}

Permutation Permutation::identity(std::size_t n) {
    Permutation p;
    p.new_to_old.resize(n);
    std::iota(p.new_to_old.begin(), p.new_to_old.end(), std::size_t{0});
    return p;
}

std::vector<std::size_t> Permutation::old_to_new() const {
    std::vector<std::size_t> inv(new_to_old.size());
    for (std::size_t k = 0; k < new_to_old.size(); ++k) {
        inv[new_to_old[k]] = k;
    }
    return inv;
}

bool Permutation::is_bijection() const {
    std::vector<bool> seen(new_to_old.size(), false);
    for (std::size_t v : new_to_old) {
        if (v >= seen.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::size_t bandwidth(const CsrLower& m) {
    std::size_t bw = 0;
    for (std::size_t i = 0; i + 1 < m.row_pointer().size(); ++i) {
        if (m.row_end(i) > m.row_begin(i)) {
            bw = std::max(bw, i - m.col_index()[m.row_begin(i)]);
        }
    }
    return bw;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency(const CsrLower& m) {
    std::vector<std::vector<std::size_t>> adj(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t k = m.row_begin(i); k < m.row_end(i); ++k) {
            const std::size_t j = m.col_index()[k];
            if (j != i) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    return adj;
}

void require_final(const CsrLower& m, const char* what) {
    if (!m.finalized()) {
        throw SparseError(std::string(what) + ": matrix not finalized");
    }
}

}  // namespace

Permutation rcm(const CsrLower& m) {
    require_final(m, "rcm");
    const std::size_t n = m.dim();
    const auto adj = adjacency(m);
    auto degree = [&](std::size_t v) { return adj[v].size(); };

    // Start node per component: minimum degree, lowest index.
    std::vector<std::size_t> starts;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        std::size_t best = root;
        stack.assign(1, root);
        seen[root] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            if (degree(u) < degree(best) || (degree(u) == degree(best) && u < best)) {
                best = u;
            }
            for (std::size_t w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        starts.push_back(best);
    }
    std::sort(starts.begin(), starts.end());

    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<bool> visited(n, false);
    std::vector<std::size_t> fresh;
    for (std::size_t s : starts) {
        std::size_t head = order.size();
        order.push_back(s);
        visited[s] = true;
        while (head < order.size()) {
            const std::size_t u = order[head++];
            fresh.clear();
            for (std::size_t w : adj[u]) {
                if (!visited[w]) {
                    visited[w] = true;
                    fresh.push_back(w);
                }
            }
            std::sort(fresh.begin(), fresh.end(), [&](std::size_t a, std::size_t b) {
                return degree(a) != degree(b) ? degree(a) < degree(b) : a < b;
            });
            order.insert(order.end(), fresh.begin(), fresh.end());
        }
    }
    std::reverse(order.begin(), order.end());
    return {std::move(order)};
}

CsrLower permute(const CsrLower& m, const Permutation& p) {
    require_final(m, "permute");
    if (p.size() != m.dim() || !p.is_bijection()) {
        throw SparseError("permute: permutation does not match matrix");
    }
    const std::size_t n = m.dim();
    const auto inv = p.old_to_new();
    // Full symmetric rows with values.
    std::vector<std::vector<std::pair<std::size_t, double>>> full(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = m.row_begin(i); k < m.row_end(i); ++k) {
            const std::size_t j = m.col_index()[k];
            const double v = m.values()[k];
            full[i].emplace_back(j, v);
            if (j != i) full[j].emplace_back(i, v);
        }
    }
    CsrLower out(n);
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (const auto& [old_col, v] : full[p.new_to_old[i]]) {
            const std::size_t c = inv[old_col];
            if (c <= i) row.emplace_back(c, v);
        }
        std::sort(row.begin(), row.end());
        for (const auto& [c, v] : row) out.insert(i, c, v);
    }
    out.finalize();
    return out;
}

std::vector<double> permute_vector(std::span<const double> v, const Permutation& p) {
    if (v.size() != p.size()) throw SparseError("permute_vector: size mismatch");
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[p.new_to_old[k]];
    return out;
}

std::vector<double> unpermute_vector(std::span<const double> v, const Permutation& p) {
    if (v.size() != p.size()) throw SparseError("unpermute_vector: size mismatch");
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[p.new_to_old[k]] = v[k];
    return out;
}

CsrLower symbolic_cholesky(const CsrLower& h) {
    require_final(h, "symbolic_cholesky");
    const std::size_t n = h.dim();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(n, kNone);
    std::vector<std::size_t> mark(n, kNone);
    std::vector<std::size_t> cols;
    CsrLower l(n);
    for (std::size_t i = 0; i < n; ++i) {
        mark[i] = i;
        cols.clear();
        // Row i of L: every node on the elimination-tree paths from the nonzeros of H's row i.
        for (std::size_t k = h.row_begin(i); k < h.row_end(i); ++k) {
            std::size_t j = h.col_index()[k];
            while (j < i && mark[j] != i) {
                cols.push_back(j);
                mark[j] = i;
                if (parent[j] == kNone) parent[j] = i;
                j = parent[j];
            }
        }
        std::sort(cols.begin(), cols.end());
        for (std::size_t j : cols) l.insert(i, j, 0.0);
        l.insert(i, i, 0.0);
    }
    l.finalize();
    return l;
}

namespace {

// Sum of L(a, k) L(b, k) over k < limit, rows given as slot ranges sorted by column.
double row_dot(const CsrLower& l, std::size_t a, std::size_t b, std::size_t limit) {
    const auto cols = l.col_index();
    const auto vals = l.values();
    std::size_t p = l.row_begin(a), pe = l.row_end(a);
    std::size_t q = l.row_begin(b), qe = l.row_end(b);
    double sum = 0.0;
    while (p < pe && q < qe) {
        const std::size_t cp = cols[p], cq = cols[q];
        if (cp >= limit || cq >= limit) break;
        if (cp == cq) {
            sum += vals[p] * vals[q];
            ++p;
            ++q;
        } else if (cp < cq) {
            ++p;
        } else {
            ++q;
        }
    }
    return sum;
}

}  // namespace

void cholesky_crout(const CsrLower& h, CsrLower& l, unsigned workers) {
    require_final(h, "cholesky_crout");
    require_final(l, "cholesky_crout");
    const std::size_t n = h.dim();
    if (l.dim() != n) throw SparseError("cholesky_crout: factor dimension mismatch");

    // Scatter H into L's pattern; H's pattern must be contained in L's.
    l.set_zero();
    auto lv = l.values();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t q = l.row_begin(i);
        for (std::size_t k = h.row_begin(i); k < h.row_end(i); ++k) {
            const std::size_t j = h.col_index()[k];
            while (q < l.row_end(i) && l.col_index()[q] < j) ++q;
            if (q == l.row_end(i) || l.col_index()[q] != j) {
                throw SparseError("cholesky_crout: factor pattern misses an entry of H");
            }
            lv[q] = h.values()[k];
        }
    }

    // Column access to the strictly lower part of L.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> column(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = l.row_begin(i); q + 1 < l.row_end(i); ++q) {
            column[l.col_index()[q]].emplace_back(i, q);
        }
        if (l.row_end(i) == l.row_begin(i) || l.col_index()[l.row_end(i) - 1] != i) {
            throw SparseError("cholesky_crout: missing diagonal slot");
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t dj = l.row_end(j) - 1;
        const double sum0 = row_dot(l, j, j, j);
        const double pivot = lv[dj] - sum0;
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NotPositiveDefinite();
        }
        const double ljj = std::sqrt(pivot);
        lv[dj] = ljj;
        const auto& rows = column[j];
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                const auto [i, slot] = rows[r];
                const double sum1 = row_dot(l, i, j, j);
                lv[slot] = (lv[slot] - sum1) / ljj;
            }
        };
        if (workers > 1 && rows.size() >= 64) {
            parallel_chunks(rows.size(), workers, work);
        } else {
            work(0, rows.size());
        }
    }
}

CsrLower cholesky_crout(const CsrLower& h, unsigned workers) {
    CsrLower l = symbolic_cholesky(h);
    cholesky_crout(h, l, workers);
    return l;
}

namespace {

double diagonal_of(const CsrLower& l, std::size_t i) {
    const std::size_t e = l.row_end(i);
    if (e == l.row_begin(i) || l.col_index()[e - 1] != i || l.values()[e - 1] == 0.0) {
        throw SparseError("triangular solve: zero diagonal at row " + std::to_string(i));
    }
    return l.values()[e - 1];
}

}  // namespace

std::vector<double> solve_lower(const CsrLower& l, std::span<const double> b) {
    require_final(l, "solve_lower");
    if (b.size() != l.dim()) throw SparseError("solve_lower: size mismatch");
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < l.dim(); ++i) {
        const double d = diagonal_of(l, i);
        double s = y[i];
        for (std::size_t q = l.row_begin(i); q + 1 < l.row_end(i); ++q) {
            s -= l.values()[q] * y[l.col_index()[q]];
        }
        y[i] = s / d;
    }
    return y;
}

std::vector<double> solve_upper_transposed(const CsrLower& l, std::span<const double> y) {
    require_final(l, "solve_upper_transposed");
    if (y.size() != l.dim()) throw SparseError("solve_upper_transposed: size mismatch");
    std::vector<double> x(y.begin(), y.end());
    for (std::size_t i = l.dim(); i-- > 0;) {
        x[i] /= diagonal_of(l, i);
        for (std::size_t q = l.row_begin(i); q + 1 < l.row_end(i); ++q) {
            x[l.col_index()[q]] -= l.values()[q] * x[i];
        }
    }
    return x;
}

}  // namespace tofslam
