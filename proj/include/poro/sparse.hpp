#ifndef PORO_SPARSE_HPP
#define PORO_SPARSE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "threading.hpp"

namespace poro {

struct Triplet {
    int row, col;
    double val;
};

// Compressed row storage with sorted column indices per row.
struct SparseMatrix {
    int nrows = 0, ncols = 0;
    std::vector<std::int64_t> offsets;  // size nrows+1
    std::vector<int> cols;
    std::vector<double> vals;

    std::int64_t nnz() const { return static_cast<std::int64_t>(cols.size()); }

    static SparseMatrix from_triplets(int nrows, int ncols, std::vector<Triplet> t) {
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix A;
        A.nrows = nrows;
        A.ncols = ncols;
        A.offsets.assign(nrows + 1, 0);
        for (size_t i = 0; i < t.size();) {
            size_t j = i;
            double s = 0.0;
            while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].val;
            A.cols.push_back(t[i].col);
            A.vals.push_back(s);
            A.offsets[t[i].row + 1]++;
            i = j;
        }
        for (int r = 0; r < nrows; ++r) A.offsets[r + 1] += A.offsets[r];
        return A;
    }

    // Symbolic construction from per-row sorted unique column lists.
    static SparseMatrix from_pattern(int nrows, int ncols, const std::vector<std::vector<int>>& rows) {
        SparseMatrix A;
        A.nrows = nrows;
        A.ncols = ncols;
        A.offsets.assign(nrows + 1, 0);
        for (int r = 0; r < nrows; ++r) A.offsets[r + 1] = A.offsets[r] + static_cast<std::int64_t>(rows[r].size());
        A.cols.reserve(A.offsets[nrows]);
        for (int r = 0; r < nrows; ++r) A.cols.insert(A.cols.end(), rows[r].begin(), rows[r].end());
        A.vals.assign(A.cols.size(), 0.0);
        return A;
    }

    std::int64_t slot(int row, int col) const {
        auto b = cols.begin() + offsets[row], e = cols.begin() + offsets[row + 1];
        auto it = std::lower_bound(b, e, col);
        if (it == e || *it != col) throw std::runtime_error("sparse: entry not in pattern");
        return it - cols.begin();
    }

    // y = A x, parallel over rows, bitwise deterministic.
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.resize(nrows);
        parallel_for(static_cast<size_t>(nrows), 2048, [&](size_t b, size_t e) {
            for (size_t r = b; r < e; ++r) {
                double s = 0.0;
                for (std::int64_t k = offsets[r]; k < offsets[r + 1]; ++k) s += vals[k] * x[cols[k]];
                y[r] = s;
            }
        });
    }

    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y;
        multiply(x, y);
        return y;
    }

    SparseMatrix extract(int row_begin, int row_end, int col_begin, int col_end) const {
        SparseMatrix B;
        B.nrows = row_end - row_begin;
        B.ncols = col_end - col_begin;
        B.offsets.assign(B.nrows + 1, 0);
        for (int r = row_begin; r < row_end; ++r)
            for (std::int64_t k = offsets[r]; k < offsets[r + 1]; ++k)
                if (cols[k] >= col_begin && cols[k] < col_end) {
                    B.cols.push_back(cols[k] - col_begin);
                    B.vals.push_back(vals[k]);
                    B.offsets[r - row_begin + 1]++;
                }
        for (int r = 0; r < B.nrows; ++r) B.offsets[r + 1] += B.offsets[r];
        return B;
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nrows, ncols);
        for (int r = 0; r < nrows; ++r)
            for (std::int64_t k = offsets[r]; k < offsets[r + 1]; ++k) D(r, cols[k]) += vals[k];
        return D;
    }

    // Symmetric permutation B = A(p,p) with order[k] = old index.
    SparseMatrix permuted(const std::vector<int>& order) const {
        std::vector<int> pos(nrows);
        for (int k = 0; k < nrows; ++k) pos[order[k]] = k;
        std::vector<Triplet> t;
        t.reserve(cols.size());
        for (int r = 0; r < nrows; ++r)
            for (std::int64_t k = offsets[r]; k < offsets[r + 1]; ++k)
                t.push_back({pos[r], pos[cols[k]], vals[k]});
        return from_triplets(nrows, ncols, std::move(t));
    }

    std::vector<std::vector<int>> adjacency_symmetrized() const {
        std::vector<std::vector<int>> adj(nrows);
        for (int r = 0; r < nrows; ++r)
            for (std::int64_t k = offsets[r]; k < offsets[r + 1]; ++k)
                if (cols[k] != r) {
                    adj[r].push_back(cols[k]);
                    adj[cols[k]].push_back(r);
                }
        for (auto& a : adj) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        return adj;
    }
};

inline double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return parallel_sum(static_cast<size_t>(a.size()),
                        [&](size_t s, size_t e) { return a.segment(s, e - s).dot(b.segment(s, e - s)); });
}

inline double norm2(const Eigen::VectorXd& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

// MatrixMarket coordinate export (1-based indices).
inline void write_matrix_market(const SparseMatrix& A, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.nrows << " " << A.ncols << " " << A.nnz() << "\n";
    char buf[64];
    for (int r = 0; r < A.nrows; ++r)
        for (std::int64_t k = A.offsets[r]; k < A.offsets[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, A.cols[k] + 1, A.vals[k]);
            os << buf;
        }
}

} // namespace poro

#endif
