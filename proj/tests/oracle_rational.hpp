// Exact-arithmetic oracle for the triple / Hormander index machinery.
//
// Everything here works over Q with explicit fractions, so intersection
// dimensions, ranks, and form signatures are exact integers with no tolerance
// anywhere.  Test frames are produced by integer symplectic transformations,
// which keeps every quantity representable.  This file deliberately shares no
// code with the library: it is the independent referee.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

struct OverflowError : std::runtime_error {
    OverflowError() : std::runtime_error("oracle: rational overflow") {}
};

// ------------------------------------------------------------------------- //
// fractions on int64 with 128-bit intermediates
// ------------------------------------------------------------------------- //
struct Frac {
    long long n = 0, d = 1;

    Frac() = default;
    Frac(long long v) : n(v), d(1) {}
    Frac(__int128 nn, __int128 dd) {
        if (dd == 0) throw std::runtime_error("oracle: zero denominator");
        if (dd < 0) { nn = -nn; dd = -dd; }
        __int128 g = gcd128(nn < 0 ? -nn : nn, dd);
        if (g > 1) { nn /= g; dd /= g; }
        if (nn > INT64_MAX / 2 || nn < INT64_MIN / 2 || dd > INT64_MAX / 2) throw OverflowError();
        n = static_cast<long long>(nn);
        d = static_cast<long long>(dd);
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b) { __int128 t = a % b; a = b; b = t; }
        return a ? a : 1;
    }
    bool zero() const { return n == 0; }
    int sign() const { return n == 0 ? 0 : (n > 0 ? 1 : -1); }
    double to_double() const { return static_cast<double>(n) / static_cast<double>(d); }
};

inline Frac operator+(const Frac& a, const Frac& b) {
    return Frac((__int128)a.n * b.d + (__int128)b.n * a.d, (__int128)a.d * b.d);
}
inline Frac operator-(const Frac& a, const Frac& b) {
    return Frac((__int128)a.n * b.d - (__int128)b.n * a.d, (__int128)a.d * b.d);
}
inline Frac operator*(const Frac& a, const Frac& b) {
    return Frac((__int128)a.n * b.n, (__int128)a.d * b.d);
}
inline Frac operator/(const Frac& a, const Frac& b) {
    if (b.n == 0) throw std::runtime_error("oracle: division by zero");
    return Frac((__int128)a.n * b.d, (__int128)a.d * b.n);
}
inline Frac operator-(const Frac& a) { return Frac(-(__int128)a.n, (__int128)a.d); }
inline bool operator==(const Frac& a, const Frac& b) { return a.n == b.n && a.d == b.d; }

using FMat = std::vector<std::vector<Frac>>;  // row-major

inline int nrows(const FMat& A) { return static_cast<int>(A.size()); }
inline int ncols(const FMat& A) { return A.empty() ? 0 : static_cast<int>(A[0].size()); }

inline FMat fzeros(int r, int c) { return FMat(r, std::vector<Frac>(c)); }

inline FMat hcat(const FMat& A, const FMat& B) {
    FMat C = A;
    for (int i = 0; i < nrows(A); ++i)
        C[i].insert(C[i].end(), B[i].begin(), B[i].end());
    return C;
}

inline FMat matmul(const FMat& A, const FMat& B) {
    FMat C = fzeros(nrows(A), ncols(B));
    for (int i = 0; i < nrows(A); ++i)
        for (int k = 0; k < ncols(A); ++k)
            if (!A[i][k].zero())
                for (int j = 0; j < ncols(B); ++j) C[i][j] = C[i][j] + A[i][k] * B[k][j];
    return C;
}

// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<int> rref(FMat& A) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < ncols(A) && row < nrows(A); ++col) {
        int piv = -1;
        for (int i = row; i < nrows(A); ++i)
            if (!A[i][col].zero()) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(A[row], A[piv]);
        Frac p = A[row][col];
        for (int j = 0; j < ncols(A); ++j) A[row][j] = A[row][j] / p;
        for (int i = 0; i < nrows(A); ++i) {
            if (i == row || A[i][col].zero()) continue;
            Frac f = A[i][col];
            for (int j = 0; j < ncols(A); ++j) A[i][j] = A[i][j] - f * A[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline int rank(FMat A) { return static_cast<int>(rref(A).size()); }

// Basis (as columns) of the nullspace of A.
inline FMat nullspace(FMat A) {
    int c = ncols(A);
    std::vector<int> pivots = rref(A);
    std::vector<bool> is_pivot(c, false);
    for (int p : pivots) is_pivot[p] = true;
    FMat N = fzeros(c, 0);
    for (int j = 0; j < c; ++j) {
        if (is_pivot[j]) continue;
        std::vector<Frac> v(c);
        v[j] = Frac(1);
        for (size_t pi = 0; pi < pivots.size(); ++pi) v[pivots[pi]] = -A[pi][j];
        for (int i = 0; i < c; ++i) N[i].push_back(v[i]);
    }
    return N;
}

// Columns of A indexed by the pivots of its RREF: a basis of the column space.
inline FMat colspace(const FMat& A) {
    FMat R = A;
    std::vector<int> pivots = rref(R);
    FMat B = fzeros(nrows(A), 0);
    for (int p : pivots)
        for (int i = 0; i < nrows(A); ++i) B[i].push_back(A[i][p]);
    return B;
}

// One solution of A x = b (free variables zero); throws if inconsistent.
inline std::vector<Frac> solve(const FMat& A, const std::vector<Frac>& b) {
    FMat Ab = A;
    for (int i = 0; i < nrows(A); ++i) Ab[i].push_back(b[i]);
    std::vector<int> pivots = rref(Ab);
    int c = ncols(A);
    for (int p : pivots)
        if (p == c) throw std::runtime_error("oracle: inconsistent system");
    std::vector<Frac> x(c);
    for (size_t pi = 0; pi < pivots.size(); ++pi) x[pivots[pi]] = Ab[pi][c];
    return x;
}

// Basis of col(Z1) cap col(Z2) via the nullspace of [Z1 | -Z2].
inline FMat intersect_cols(const FMat& Z1, const FMat& Z2) {
    if (ncols(Z1) == 0 || ncols(Z2) == 0) return fzeros(nrows(Z1), 0);
    FMat M = Z1;
    for (int i = 0; i < nrows(M); ++i)
        for (int j = 0; j < ncols(Z2); ++j) M[i].push_back(-Z2[i][j]);
    FMat N = nullspace(std::move(M));
    FMat vecs = fzeros(nrows(Z1), 0);
    for (int j = 0; j < ncols(N); ++j)
        for (int i = 0; i < nrows(Z1); ++i) {
            Frac v(0);
            for (int k = 0; k < ncols(Z1); ++k) v = v + Z1[i][k] * N[k][j];
            vecs[i].push_back(v);
        }
    return colspace(vecs);
}

inline FMat sum_cols(const FMat& Z1, const FMat& Z2) { return colspace(hcat(Z1, Z2)); }

// ------------------------------------------------------------------------- //
// symplectic structure with signature r:  J = [[0,-Q],[Q,0]], Q = diag(I_r,-I)
// ------------------------------------------------------------------------- //
struct Space {
    int n, r;
    Space(int n_, int r_) : n(n_), r(r_) {}
    Frac qdiag(int i) const { return Frac(i < r ? 1 : -1); }
    // omega(x, y) = <Jx, y> with the block structure written out.
    Frac omega(const std::vector<Frac>& x, const std::vector<Frac>& y) const {
        Frac s(0);
        for (int i = 0; i < n; ++i) {
            // (Jx)_i = -Q x_{n+i}  (top block),  (Jx)_{n+i} = Q x_i  (bottom block)
            s = s + (-qdiag(i)) * x[n + i] * y[i] + qdiag(i) * x[i] * y[n + i];
        }
        return s;
    }
};

inline std::vector<Frac> col(const FMat& A, int j) {
    std::vector<Frac> v(nrows(A));
    for (int i = 0; i < nrows(A); ++i) v[i] = A[i][j];
    return v;
}

// Signature (m+, m0, m-) of an exact symmetric form by congruence
// diagonalization (Lagrange reduction).
struct Sig {
    int pos = 0, zero = 0, neg = 0;
};

inline Sig signature(FMat G) {
    int k = nrows(G);
    Sig s;
    for (int i = 0; i < k; ++i) {
        if (G[i][i].zero()) {
            int j_diag = -1, j_off = -1;
            for (int j = i + 1; j < k; ++j) {
                if (!G[j][j].zero() && j_diag < 0) j_diag = j;
                if (!G[i][j].zero() && j_off < 0) j_off = j;
            }
            if (j_diag >= 0) {
                std::swap(G[i], G[j_diag]);
                for (int t = 0; t < k; ++t) std::swap(G[t][i], G[t][j_diag]);
            } else if (j_off >= 0) {
                // row/col i += row/col j_off turns the zero diagonal entry
                // into 2 G[i][j_off] != 0
                for (int t = 0; t < k; ++t) G[i][t] = G[i][t] + G[j_off][t];
                for (int t = 0; t < k; ++t) G[t][i] = G[t][i] + G[t][j_off];
            } else {
                ++s.zero;
                continue;
            }
        }
        Frac p = G[i][i];
        for (int j = i + 1; j < k; ++j) {
            if (G[i][j].zero()) continue;
            Frac f = G[i][j] / p;
            for (int t = 0; t < k; ++t) G[j][t] = G[j][t] - f * G[i][t];
            for (int t = 0; t < k; ++t) G[t][j] = G[t][j] - f * G[t][i];
        }
        if (p.sign() > 0) ++s.pos;
        else ++s.neg;
    }
    return s;
}

// ------------------------------------------------------------------------- //
// exact triple form, triple index, Hormander index
// ------------------------------------------------------------------------- //

// Form Q(alpha,beta;delta) on alpha cap (beta+delta): x = y + z, value
// omega(y_i, z_j).  Returns the gram matrix and its domain dimension.
struct TripleForm {
    FMat gram;
    int dim = 0;
};

inline TripleForm triple_form(const Space& sp, const FMat& A, const FMat& B, const FMat& D) {
    TripleForm out;
    FMat dom = intersect_cols(A, sum_cols(B, D));
    out.dim = ncols(dom);
    out.gram = fzeros(out.dim, out.dim);
    if (out.dim == 0) return out;
    FMat BD = hcat(B, D);
    std::vector<std::vector<Frac>> ys, zs;
    for (int j = 0; j < out.dim; ++j) {
        std::vector<Frac> c = solve(BD, col(dom, j));
        std::vector<Frac> y(nrows(A), Frac(0)), z(nrows(A), Frac(0));
        for (int i = 0; i < nrows(A); ++i) {
            for (int k = 0; k < ncols(B); ++k) y[i] = y[i] + B[i][k] * c[k];
            for (int k = 0; k < ncols(D); ++k) z[i] = z[i] + D[i][k] * c[ncols(B) + k];
        }
        ys.push_back(std::move(y));
        zs.push_back(std::move(z));
    }
    for (int i = 0; i < out.dim; ++i)
        for (int j = 0; j < out.dim; ++j) out.gram[i][j] = sp.omega(ys[i], zs[j]);
    for (int i = 0; i < out.dim; ++i)
        for (int j = 0; j < out.dim; ++j)
            if (!(out.gram[i][j] == out.gram[j][i]))
                throw std::runtime_error("oracle: triple form not symmetric");
    return out;
}

inline int triple_index(const Space& sp, const FMat& A, const FMat& B, const FMat& K) {
    TripleForm q = triple_form(sp, A, B, K);
    int m_plus = signature(q.gram).pos;
    int d_ak = ncols(intersect_cols(A, K));
    int d_abk = ncols(intersect_cols(intersect_cols(A, B), K));
    return m_plus + d_ak - d_abk;
}

inline int hormander_index(const Space& sp, const FMat& l1, const FMat& l2, const FMat& k1,
                           const FMat& k2) {
    int via_l = triple_index(sp, l1, l2, k2) - triple_index(sp, l1, l2, k1);
    int via_k = triple_index(sp, l1, k1, k2) - triple_index(sp, l2, k1, k2);
    if (via_l != via_k) throw std::runtime_error("oracle: Hormander expressions disagree");
    return via_l;
}

// ------------------------------------------------------------------------- //
// random Lagrangian frames from integer symplectic products
// ------------------------------------------------------------------------- //

// Random element of Sp(2n, Q) w.r.t. the standard J0 = [[0,-I],[I,0]],
// as a short product of elementary generators with small integer entries.
inline FMat random_symplectic_std(int n, std::mt19937& rng, int factors = 3) {
    std::uniform_int_distribution<int> small(-2, 2);
    auto sym_rand = [&]() {
        FMat S = fzeros(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) S[i][j] = S[j][i] = Frac(small(rng));
        return S;
    };
    FMat M = fzeros(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) M[i][i] = Frac(1);
    std::uniform_int_distribution<int> kind(0, 2);
    for (int f = 0; f < factors; ++f) {
        FMat G = fzeros(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i) G[i][i] = Frac(1);
        int k = kind(rng);
        if (k == 0) {  // [[I, S],[0, I]]
            FMat S = sym_rand();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) G[i][n + j] = S[i][j];
        } else if (k == 1) {  // [[I, 0],[S, I]]
            FMat S = sym_rand();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) G[n + i][j] = S[i][j];
        } else {  // [[P, 0],[0, P^{-T}]] with P = I + strictly triangular ints
            FMat P = fzeros(n, n), Pinv = fzeros(n, n);
            for (int i = 0; i < n; ++i) P[i][i] = Pinv[i][i] = Frac(1);
            if (n > 1) {
                int p = small(rng);
                P[0][1] = Frac(p);
                Pinv[0][1] = Frac(-p);  // inverse of a unit upper bidiagonal
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    G[i][j] = P[i][j];
                    G[n + i][n + j] = Pinv[j][i];  // P^{-T}
                }
        }
        M = matmul(M, G);
    }
    return M;
}

// A Lagrangian frame for the signature-r structure: take the first n columns
// of a random standard-symplectic matrix (the image of R^n x {0}) and map it
// through diag(I, Q), which intertwines J0 with J = [[0,-Q],[Q,0]].
inline FMat random_lagrangian(const Space& sp, std::mt19937& rng) {
    FMat M = random_symplectic_std(sp.n, rng);
    FMat Z = fzeros(2 * sp.n, sp.n);
    for (int i = 0; i < 2 * sp.n; ++i)
        for (int j = 0; j < sp.n; ++j) {
            Frac v = M[i][j];
            if (i >= sp.n) v = sp.qdiag(i - sp.n) * v;
            Z[i][j] = v;
        }
    return Z;
}

inline Eigen::MatrixXd to_double(const FMat& A) {
    Eigen::MatrixXd M(nrows(A), ncols(A));
    for (int i = 0; i < nrows(A); ++i)
        for (int j = 0; j < ncols(A); ++j) M(i, j) = A[i][j].to_double();
    return M;
}

}  // namespace oracle
