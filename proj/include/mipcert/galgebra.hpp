#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mipcert/gf2.hpp"
#include "mipcert/pcgroup.hpp"

namespace mipcert::alg {

using gf2::BitVector;
using gf2::Subspace;

/// Modular group algebra kG over the field with two elements.  Elements are
/// BitVectors of length |G|: bit i is the coefficient of the group element
/// with index i, so addition is XOR and a support set describes the element
/// as a sum of group elements.  Immutable after construction.
class GroupAlgebra {
public:
    explicit GroupAlgebra(std::shared_ptr<const pc::Group> g);

    const pc::Group& group() const { return *grp_; }
    std::shared_ptr<const pc::Group> group_ptr() const { return grp_; }
    std::size_t dim() const { return dim_; }

    BitVector zero() const { return BitVector(dim_); }
    BitVector one() const { return BitVector::unit(dim_, 0); }
    BitVector embed(std::uint32_t g) const { return BitVector::unit(dim_, g); }
    /// g + 1
    BitVector embed_plus_one(std::uint32_t g) const;

    /// Product in the algebra: convolution of supports through the group
    /// multiplication table.  OpenMP-parallel over the left support.
    BitVector mul(const BitVector& a, const BitVector& b) const;
    BitVector mul_serial(const BitVector& a, const BitVector& b) const;

    /// g * v and v * g (coordinate permutations).
    BitVector left_translate(std::uint32_t g, const BitVector& v) const;
    BitVector right_translate(const BitVector& v, std::uint32_t g) const;

    BitVector square(const BitVector& a) const { return mul(a, a); }
    BitVector pow(BitVector a, std::uint64_t k) const;

    /// Ring homomorphism onto the field: parity of the support.
    int augmentation(const BitVector& a) const { return a.parity() ? 1 : 0; }

    /// Inverse of a unit via the Neumann series sum_i (1+u)^i (finite: the
    /// augmentation ideal is nilpotent).  nullopt when augmentation(u) = 0.
    std::optional<BitVector> unit_inverse(const BitVector& u) const;

    /// u^h = h^-1 u h for a unit h (h_inv supplied by the caller).
    BitVector conjugate(const BitVector& u, const BitVector& h, const BitVector& h_inv) const;
    /// [u, v] = u^-1 v^-1 u v; both must be units.
    BitVector commutator(const BitVector& u, const BitVector& v) const;

    /// Commutes with every generator embedding (generators generate).
    bool is_central(const BitVector& a) const;

    /// Span of {g + 1 : g != 1}; dimension |G| - 1.
    Subspace augmentation_ideal() const;

    struct Filtration {
        /// layers[k] = I^k; layers[0] is the whole algebra, layers.back() is zero.
        std::vector<Subspace> layers;
        /// Largest t with I^t != 0.
        std::size_t nilpotency_index = 0;
        /// dim I^k / I^(k+1) for k = 0 .. nilpotency_index.
        std::vector<std::size_t> quotient_dims() const;
    };

    enum class FiltrationStrategy {
        /// I^(k+1) = sum over generators of I^k * (g+1); each product is a
        /// translate-XOR.  Same subspaces as the product route, much cheaper.
        generator_translates,
        /// I^(k+1) = product_span(I^1 basis, I^k basis).
        product_span,
    };

    /// Augmentation-ideal powers I = I^1 > I^2 > ... > 0.
    Filtration ideal_filtration(FiltrationStrategy s = FiltrationStrategy::generator_translates) const;

    /// Jennings dimension subgroups D_k = G n (1 + I^k), one per filtration
    /// layer, descending from D_1 = G to the trivial group.
    std::vector<pc::Subgroup> dimension_subgroups(const Filtration& f) const;

    /// Conjugacy class sums; their span is the center of the algebra.
    std::vector<BitVector> class_sums() const;
    Subspace center_basis() const;
    /// Center computed independently as the kernel of v -> (v g - g v)_g.
    Subspace center_kernel() const;

    /// Two-sided ideal generated by a: closure of span{a} under left and
    /// right multiplication by group generators.
    Subspace two_sided_ideal(const BitVector& a) const;
    /// J^k via product_span.
    Subspace ideal_power(const Subspace& j, unsigned k) const;

    enum class RingGenStrategy {
        /// Closure of span(elems) under left multiplication by the listed
        /// elements; spans exactly the words in the generators.
        generator_words,
        /// span <- span + product_span(span, span) until stable.
        span_squaring,
    };

    /// Smallest subspace containing elems and closed under multiplication.
    Subspace ring_generated_by(std::span<const BitVector> elems,
                               RingGenStrategy s = RingGenStrategy::generator_words) const;

    /// Element rendered as a sum of group words, e.g. "a*b*c^2 + b^2*c".
    std::string format_element(const BitVector& a, std::size_t max_terms = 16) const;

private:
    std::shared_ptr<const pc::Group> grp_;
    std::size_t dim_;
};

}  // namespace mipcert::alg
