#include <doctest.h>

#include <random>

#include "mipcert/gf2.hpp"

using namespace mipcert::gf2;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    std::mt19937_64 rng(seed);
    for (auto& r : m.row)
        for (std::size_t i = 0; i < cols; ++i)
            if (rng() & 1) r.set(i);
    return m;
}

BitVector row_combination(const Matrix& m, const BitVector& x) {
    BitVector out(m.cols);
    x.for_each_set([&](std::size_t i) { out ^= m.row[i]; });
    return out;
}

}  // namespace

TEST_SUITE("gf2") {

TEST_CASE("bitvector basics") {
    BitVector v(130);
    CHECK(v.none());
    v.set(0);
    v.set(129);
    CHECK(v.get(0));
    CHECK(v.get(129));
    CHECK_FALSE(v.get(64));
    CHECK(v.popcount() == 2);
    CHECK(v.parity() == false);
    v.flip(5);
    CHECK(v.parity() == true);
    CHECK(v.lowest_set() == 0);
    CHECK(v.lowest_set_from(1) == 5);
    CHECK(v.lowest_set_from(130) == -1);

    BitVector w(130);
    w.set(0);
    v ^= w;
    CHECK_FALSE(v.get(0));
    CHECK(v.set_bits() == std::vector<std::uint32_t>{5, 129});
}

TEST_CASE("bitvector hex round trip") {
    std::mt19937_64 rng(11);
    for (const std::size_t n : {1u, 7u, 8u, 63u, 64u, 65u, 512u}) {
        BitVector v(n);
        for (std::size_t i = 0; i < n; ++i)
            if (rng() & 1) v.set(i);
        CHECK(BitVector::from_hex(v.to_hex(), n) == v);
    }
    CHECK_THROWS_AS(BitVector::from_hex("zz", 8), std::invalid_argument);
    CHECK_THROWS_AS(BitVector::from_hex("ff", 16), std::invalid_argument);
    // set bits past the length
    CHECK_THROWS_AS(BitVector::from_hex("80", 7), std::invalid_argument);
}

TEST_CASE("rref basics") {
    CHECK(rref(Matrix(5, 8)).dim() == 0);

    const Matrix id = Matrix::identity(6);
    const Subspace s = rref(id);
    CHECK(s.dim() == 6);
    CHECK(s.pivots() == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});

    // {110, 011, 101}: the third row is the sum of the first two
    Matrix m(3, 3);
    m.row[0].set(0);
    m.row[0].set(1);
    m.row[1].set(1);
    m.row[1].set(2);
    m.row[2].set(0);
    m.row[2].set(2);
    CHECK(rref(m).dim() == 2);
}

TEST_CASE("rref parallel kernel equals serial reference") {
    for (const auto [r, c, seed] : {std::tuple{64, 64, 1ul}, {100, 37, 2ul},
                                    {200, 300, 3ul}, {257, 129, 4ul}}) {
        const Matrix m = random_matrix(r, c, seed);
        CHECK(rref(m) == rref_serial(m));
    }
}

TEST_CASE("rref idempotence") {
    const Matrix m = random_matrix(80, 60, 99);
    const Subspace s = rref(m);
    Matrix basis(s.dim(), 60);
    basis.row = s.basis();
    CHECK(rref(basis) == s);
}

TEST_CASE("rank of transpose") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const Matrix m = random_matrix(64, 64, 1000 + seed);
        CHECK(rank(m) == rank(transpose(m)));
    }
}

TEST_CASE("in_span and residues") {
    const Matrix m = random_matrix(30, 64, 5);
    const Subspace s = rref(m);

    CHECK(in_span(BitVector(64), s).member);            // zero vector
    CHECK(in_span(s.basis().front(), s).member);        // basis row

    // random vectors of the row space are members
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        BitVector x(30);
        for (std::size_t i = 0; i < 30; ++i)
            if (rng() & 1) x.set(i);
        CHECK(in_span(row_combination(m, x), s).member);
    }

    // a unit vector outside a proper coordinate subspace
    Matrix coord(2, 8);
    coord.row[0].set(1);
    coord.row[1].set(3);
    const Subspace cs = rref(coord);
    CHECK_FALSE(in_span(BitVector::unit(8, 0), cs).member);

    // adding the residue lands in the span
    for (int t = 0; t < 50; ++t) {
        BitVector v(64);
        for (std::size_t i = 0; i < 64; ++i)
            if (rng() & 1) v.set(i);
        const SpanTest st = in_span(v, s);
        CHECK(in_span(v ^ st.residue, s).member);
    }
}

TEST_CASE("subspace sum and shuffled equality") {
    Matrix m = random_matrix(40, 50, 7);
    const Subspace a = rref(m);
    std::mt19937_64 rng(8);
    std::shuffle(m.row.begin(), m.row.end(), rng);
    CHECK(rref(m) == a);

    const Matrix m2 = random_matrix(20, 50, 9);
    const Subspace b = rref(m2);
    const Subspace sum = subspace_sum(a, b);
    for (const auto& r : b.basis()) CHECK(sum.contains(r));
    for (const auto& r : a.basis()) CHECK(sum.contains(r));
}

TEST_CASE("solve") {
    const Matrix m = random_matrix(24, 40, 10);

    // b = 0 -> x = 0 accepted
    const auto zero = solve(m, BitVector(40));
    REQUIRE(zero.has_value());
    CHECK(row_combination(m, *zero) == BitVector(40));

    // invertible matrix, b a row -> unit coordinate vector
    const Matrix id = Matrix::identity(16);
    const auto unit = solve(id, BitVector::unit(16, 5));
    REQUIRE(unit.has_value());
    CHECK(*unit == BitVector::unit(16, 5));

    // solvable systems round trip
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        BitVector x(24);
        for (std::size_t i = 0; i < 24; ++i)
            if (rng() & 1) x.set(i);
        const BitVector b = row_combination(m, x);
        const auto sol = solve(m, b);
        REQUIRE(sol.has_value());
        CHECK(row_combination(m, *sol) == b);
    }

    // inconsistent system
    Matrix low(2, 4);
    low.row[0].set(0);
    low.row[1].set(1);
    BitVector b(4);
    b.set(3);
    CHECK_FALSE(solve(low, b).has_value());
}

TEST_CASE("product_span with a bilinear map") {
    // bitwise AND is bilinear over GF(2)
    auto mul = [](const BitVector& a, const BitVector& b) {
        BitVector out(a.size());
        for (std::size_t w = 0; w < out.words().size(); ++w)
            out.words()[w] = a.words()[w] & b.words()[w];
        return out;
    };

    const std::vector<BitVector> zero = {BitVector(32)};
    const Matrix v = random_matrix(20, 32, 12);
    CHECK(product_span(std::span<const BitVector>(zero),
                       std::span<const BitVector>(v.row), 32, mul)
              .dim() == 0);

    const Matrix u = random_matrix(40, 32, 13);
    const Subspace par = product_span(std::span<const BitVector>(u.row),
                                      std::span<const BitVector>(v.row), 32, mul);
    const Subspace ser = product_span_serial(std::span<const BitVector>(u.row),
                                             std::span<const BitVector>(v.row), 32, mul);
    CHECK(par == ser);
}

TEST_CASE("matrix encode/decode") {
    const Matrix m = random_matrix(17, 43, 14);
    const Matrix back = decode_matrix(encode(m));
    CHECK(back == m);

    CHECK_THROWS_AS(decode_matrix("nonsense 3 4\n"), std::invalid_argument);
    CHECK_THROWS_AS(decode_matrix("gf2 2 8\nff\n"), std::invalid_argument);  // truncated
}

}  // TEST_SUITE
