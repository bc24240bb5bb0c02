#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mipcert/bitvec.hpp"

namespace mipcert::gf2 {

/// Dense bit matrix, row major.  All rows have length cols.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<BitVector> row;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), row(r, BitVector(c)) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.row[i].set(i);
        return m;
    }

    bool get(std::size_t r, std::size_t c) const { return row[r].get(c); }
    void set(std::size_t r, std::size_t c) { row[r].set(c); }

    bool operator==(const Matrix&) const = default;
};

Matrix transpose(const Matrix& m);

/// Row-reduced basis of a subspace of GF(2)^ambient.  Rows are kept in reduced
/// row echelon form with strictly increasing pivot columns; every pivot column
/// is zero in all other rows.  RREF is unique per row space, so two Subspaces
/// are equal iff their basis rows are identical.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient) : ambient_(ambient), pivot_row_(ambient, -1) {}

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return rows_.size(); }

    const std::vector<BitVector>& basis() const { return rows_; }
    const std::vector<std::uint32_t>& pivots() const { return pivots_; }

    /// Residue of v after reduction by the basis; zero iff v is in the span.
    BitVector reduce(BitVector v) const;
    bool contains(const BitVector& v) const { return reduce(v).none(); }

    /// Insert v, keeping reduced form.  Returns true when the dimension grew.
    bool insert(BitVector v);

    bool operator==(const Subspace& o) const {
        return ambient_ == o.ambient_ && rows_ == o.rows_;
    }

private:
    std::size_t ambient_ = 0;
    std::vector<BitVector> rows_;
    std::vector<std::uint32_t> pivots_;
    std::vector<std::int32_t> pivot_row_;  // column -> row index or -1
};

/// Result of an in-span membership test; residue is zero iff member.
struct SpanTest {
    bool member;
    BitVector residue;
};

SpanTest in_span(const BitVector& v, const Subspace& s);

/// Reduced row echelon form of the row space of m.  OpenMP-parallel
/// elimination; bit-identical to rref_serial (RREF is unique).
Subspace rref(const Matrix& m);
/// Serial reference: incremental insertion into a Subspace.
Subspace rref_serial(const Matrix& m);

std::size_t rank(const Matrix& m);

Subspace subspace_sum(const Subspace& a, const Subspace& b);

/// Solves x * m = b (x a combination of m's rows).  nullopt when inconsistent.
std::optional<BitVector> solve(const Matrix& m, const BitVector& b);

namespace detail {
Subspace eliminate_rows(std::vector<BitVector> rows, std::size_t cols, bool parallel);
}

/// Span of all pairwise products mul(u, v), u in U, v in V.  Products are
/// deduplicated by hashing before elimination.  Parallel over the pair grid
/// with per-thread partial bases and a final merge-eliminate step; the result
/// is the unique RREF, independent of scheduling.
template <class MulFn>
Subspace product_span(std::span<const BitVector> U, std::span<const BitVector> V,
                      std::size_t ambient, MulFn&& mul, bool parallel = true);

template <class MulFn>
Subspace product_span_serial(std::span<const BitVector> U, std::span<const BitVector> V,
                             std::size_t ambient, MulFn&& mul) {
    Subspace s(ambient);
    std::unordered_set<BitVector, BitVectorHash> seen;
    for (const auto& u : U)
        for (const auto& v : V) {
            BitVector p = mul(u, v);
            if (seen.insert(p).second) s.insert(std::move(p));
        }
    return s;
}

/// Matrix text block: header line "gf2 <rows> <cols>" followed by one hex row
/// per line (see BitVector::to_hex).
std::string encode(const Matrix& m);
Matrix decode_matrix(std::string_view text);

}  // namespace mipcert::gf2

// ---- template implementation ----

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mipcert::gf2 {

template <class MulFn>
Subspace product_span(std::span<const BitVector> U, std::span<const BitVector> V,
                      std::size_t ambient, MulFn&& mul, bool parallel) {
#ifdef _OPENMP
    if (parallel && U.size() * V.size() >= 4096) {
        std::vector<Subspace> local;
        #pragma omp parallel
        {
            #pragma omp single
            local.assign(static_cast<std::size_t>(omp_get_num_threads()), Subspace(ambient));
            Subspace& mine = local[static_cast<std::size_t>(omp_get_thread_num())];
            std::unordered_set<BitVector, BitVectorHash> seen;
            #pragma omp for collapse(2) schedule(dynamic, 64)
            for (std::size_t i = 0; i < U.size(); ++i)
                for (std::size_t j = 0; j < V.size(); ++j) {
                    BitVector p = mul(U[i], V[j]);
                    if (seen.insert(p).second) mine.insert(std::move(p));
                }
        }
        Subspace out(ambient);
        for (const auto& part : local)
            for (const auto& r : part.basis()) out.insert(r);
        return out;
    }
#endif
    (void)parallel;
    return product_span_serial(U, V, ambient, mul);
}

}  // namespace mipcert::gf2
