#include "mipcert/gf2.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mipcert::gf2 {

std::string BitVector::to_hex() const {
    static const char* digits = "0123456789abcdef";
    const std::size_t nbytes = (n_ + 7) / 8;
    std::string out(nbytes * 2, '0');
    for (std::size_t b = 0; b < nbytes; ++b) {
        const unsigned byte = static_cast<unsigned>((w_[b >> 3] >> ((b & 7) * 8)) & 0xffu);
        out[2 * b] = digits[byte >> 4];
        out[2 * b + 1] = digits[byte & 0xf];
    }
    return out;
}

BitVector BitVector::from_hex(std::string_view hex, std::size_t n) {
    const std::size_t nbytes = (n + 7) / 8;
    if (hex.size() != nbytes * 2)
        throw std::invalid_argument("bit row: expected " + std::to_string(nbytes * 2) +
                                    " hex digits, got " + std::to_string(hex.size()));
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
        throw std::invalid_argument(std::string("bit row: bad hex digit '") + c + "'");
    };
    BitVector v(n);
    for (std::size_t b = 0; b < nbytes; ++b) {
        const std::uint64_t byte = nibble(hex[2 * b]) << 4 | nibble(hex[2 * b + 1]);
        v.w_[b >> 3] |= byte << ((b & 7) * 8);
    }
    // reject set bits past n
    if (n % 64 != 0 && !v.w_.empty()) {
        const std::uint64_t mask = ~std::uint64_t{0} << (n % 64);
        if (v.w_.back() & mask) throw std::invalid_argument("bit row: bits set beyond length");
    }
    return v;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        m.row[r].for_each_set([&](std::size_t c) { t.row[c].set(r); });
    return t;
}

BitVector Subspace::reduce(BitVector v) const {
    long p = v.lowest_set();
    while (p >= 0) {
        const std::int32_t r = pivot_row_[static_cast<std::size_t>(p)];
        if (r >= 0) {
            v ^= rows_[static_cast<std::size_t>(r)];
            p = v.lowest_set_from(static_cast<std::size_t>(p));
        } else {
            p = v.lowest_set_from(static_cast<std::size_t>(p) + 1);
        }
    }
    return v;
}

bool Subspace::insert(BitVector v) {
    v = reduce(std::move(v));
    if (v.none()) return false;
    const auto p = static_cast<std::uint32_t>(v.lowest_set());
    // clear column p in existing rows
    for (std::size_t r = 0; r < rows_.size(); ++r)
        if (rows_[r].get(p)) rows_[r] ^= v;
    const auto pos =
        std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
    rows_.insert(rows_.begin() + pos, std::move(v));
    pivots_.insert(pivots_.begin() + pos, p);
    for (std::size_t c = 0; c < ambient_; ++c)
        if (pivot_row_[c] >= static_cast<std::int32_t>(pos)) ++pivot_row_[c];
    pivot_row_[p] = static_cast<std::int32_t>(pos);
    return true;
}

SpanTest in_span(const BitVector& v, const Subspace& s) {
    BitVector res = s.reduce(v);
    const bool member = res.none();
    return SpanTest{member, std::move(res)};
}

namespace detail {

Subspace eliminate_rows(std::vector<BitVector> rows, std::size_t cols, bool parallel) {
    const std::size_t n = rows.size();
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols && r < n; ++col) {
        std::size_t piv = n;
        for (std::size_t i = r; i < n; ++i)
            if (rows[i].get(col)) {
                piv = i;
                break;
            }
        if (piv == n) continue;
        std::swap(rows[r], rows[piv]);
        const BitVector& prow = rows[r];
#ifdef _OPENMP
        #pragma omp parallel for schedule(static) if (parallel && n > 128)
#endif
        for (std::size_t t = 0; t < n; ++t) {
            if (t != r && rows[t].get(col)) rows[t] ^= prow;
        }
        ++r;
    }
    (void)parallel;
    Subspace s(cols);
    for (std::size_t i = 0; i < r; ++i) s.insert(std::move(rows[i]));
    return s;
}

}  // namespace detail

Subspace rref(const Matrix& m) { return detail::eliminate_rows(m.row, m.cols, true); }

Subspace rref_serial(const Matrix& m) {
    Subspace s(m.cols);
    for (const auto& row : m.row) s.insert(row);
    return s;
}

std::size_t rank(const Matrix& m) { return rref(m).dim(); }

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient() != b.ambient())
        throw std::invalid_argument("subspace_sum: ambient dimensions differ");
    Subspace s = a;
    for (const auto& row : b.basis()) s.insert(row);
    return s;
}

std::optional<BitVector> solve(const Matrix& m, const BitVector& b) {
    if (b.size() != m.cols) throw std::invalid_argument("solve: length mismatch");
    // augmented rows [m.row[i] | e_i]; pivots restricted to the first m.cols columns
    const std::size_t width = m.cols + m.rows;
    std::vector<BitVector> aug(m.rows, BitVector(width));
    for (std::size_t i = 0; i < m.rows; ++i) {
        m.row[i].for_each_set([&](std::size_t c) { aug[i].set(c); });
        aug[i].set(m.cols + i);
    }
    std::vector<std::int32_t> pivot_row(m.cols, -1);
    std::size_t r = 0;
    for (std::size_t col = 0; col < m.cols && r < m.rows; ++col) {
        std::size_t piv = m.rows;
        for (std::size_t i = r; i < m.rows; ++i)
            if (aug[i].get(col)) {
                piv = i;
                break;
            }
        if (piv == m.rows) continue;
        std::swap(aug[r], aug[piv]);
        for (std::size_t t = 0; t < m.rows; ++t)
            if (t != r && aug[t].get(col)) aug[t] ^= aug[r];
        pivot_row[col] = static_cast<std::int32_t>(r);
        ++r;
    }
    BitVector target(width);
    b.for_each_set([&](std::size_t c) { target.set(c); });
    for (std::size_t col = 0; col < m.cols; ++col)
        if (target.get(col)) {
            if (pivot_row[col] < 0) return std::nullopt;
            target ^= aug[static_cast<std::size_t>(pivot_row[col])];
        }
    for (std::size_t col = 0; col < m.cols; ++col)
        if (target.get(col)) return std::nullopt;
    BitVector x(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        if (target.get(m.cols + i)) x.set(i);
    return x;
}

std::string encode(const Matrix& m) {
    std::string out = "gf2 " + std::to_string(m.rows) + " " + std::to_string(m.cols) + "\n";
    for (const auto& r : m.row) {
        out += r.to_hex();
        out += '\n';
    }
    return out;
}

Matrix decode_matrix(std::string_view text) {
    auto next_line = [&text]() -> std::optional<std::string_view> {
        if (text.empty()) return std::nullopt;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
        return line;
    };
    auto header = next_line();
    if (!header) throw std::invalid_argument("gf2 block: empty input");
    std::size_t rows = 0, cols = 0;
    {
        const std::string h(*header);
        if (h.rfind("gf2 ", 0) != 0) throw std::invalid_argument("gf2 block: bad header");
        char* end = nullptr;
        rows = std::strtoull(h.c_str() + 4, &end, 10);
        cols = std::strtoull(end, &end, 10);
        if (rows == 0 || cols == 0) throw std::invalid_argument("gf2 block: bad dimensions");
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        auto line = next_line();
        if (!line) throw std::invalid_argument("gf2 block: truncated at row " + std::to_string(i));
        m.row[i] = BitVector::from_hex(*line, cols);
    }
    return m;
}

}  // namespace mipcert::gf2
