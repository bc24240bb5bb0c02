#include "mipcert/galgebra.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mipcert::alg {

GroupAlgebra::GroupAlgebra(std::shared_ptr<const pc::Group> g)
    : grp_(std::move(g)), dim_(static_cast<std::size_t>(grp_->order())) {
    if (!grp_) throw std::invalid_argument("GroupAlgebra: null group");
}

BitVector GroupAlgebra::embed_plus_one(std::uint32_t g) const {
    BitVector v(dim_);
    v.flip(0);
    v.flip(g);  // g = 1 gives zero
    return v;
}

BitVector GroupAlgebra::mul_serial(const BitVector& a, const BitVector& b) const {
    BitVector out(dim_);
    const auto& g = *grp_;
    if (g.has_table()) {
        const std::uint16_t* table = g.table().data();
        a.for_each_set([&](std::size_t i) {
            const std::uint16_t* row = table + i * dim_;
            b.for_each_set([&](std::size_t j) { out.flip(row[j]); });
        });
    } else {
        a.for_each_set([&](std::size_t i) {
            b.for_each_set([&](std::size_t j) {
                out.flip(g.mul(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
            });
        });
    }
    return out;
}

BitVector GroupAlgebra::mul(const BitVector& a, const BitVector& b) const {
#ifdef _OPENMP
    const std::size_t sa = a.popcount();
    if (grp_->has_table() && sa >= 64 && b.any()) {
        const std::vector<std::uint32_t> supp = a.set_bits();
        const std::uint16_t* table = grp_->table().data();
        BitVector out(dim_);
        #pragma omp parallel
        {
            BitVector local(dim_);
            #pragma omp for schedule(static) nowait
            for (std::size_t t = 0; t < supp.size(); ++t) {
                const std::uint16_t* row = table + static_cast<std::size_t>(supp[t]) * dim_;
                b.for_each_set([&](std::size_t j) { local.flip(row[j]); });
            }
            #pragma omp critical
            out ^= local;
        }
        return out;
    }
#endif
    return mul_serial(a, b);
}

BitVector GroupAlgebra::left_translate(std::uint32_t g, const BitVector& v) const {
    BitVector out(dim_);
    const auto& grp = *grp_;
    v.for_each_set([&](std::size_t j) { out.set(grp.mul(g, static_cast<std::uint32_t>(j))); });
    return out;
}

BitVector GroupAlgebra::right_translate(const BitVector& v, std::uint32_t g) const {
    BitVector out(dim_);
    const auto& grp = *grp_;
    v.for_each_set([&](std::size_t j) { out.set(grp.mul(static_cast<std::uint32_t>(j), g)); });
    return out;
}

BitVector GroupAlgebra::pow(BitVector a, std::uint64_t k) const {
    BitVector acc = one();
    while (k) {
        if (k & 1) acc = mul(acc, a);
        k >>= 1;
        if (k) a = mul(a, a);
    }
    return acc;
}

std::optional<BitVector> GroupAlgebra::unit_inverse(const BitVector& u) const {
    if (augmentation(u) != 1) return std::nullopt;
    BitVector v = u ^ one();  // nilpotent
    BitVector acc = one();
    BitVector term = v;
    while (term.any()) {
        acc ^= term;
        term = mul(term, v);
    }
    return acc;
}

BitVector GroupAlgebra::conjugate(const BitVector& u, const BitVector& h,
                                  const BitVector& h_inv) const {
    return mul(mul(h_inv, u), h);
}

BitVector GroupAlgebra::commutator(const BitVector& u, const BitVector& v) const {
    const auto ui = unit_inverse(u);
    const auto vi = unit_inverse(v);
    if (!ui || !vi) throw std::invalid_argument("commutator: arguments must be units");
    return mul(mul(mul(*ui, *vi), u), v);
}

bool GroupAlgebra::is_central(const BitVector& a) const {
    for (std::size_t i = 0; i < grp_->ngens(); ++i) {
        const std::uint32_t g = grp_->generator(i);
        if (!(left_translate(g, a) == right_translate(a, g))) return false;
    }
    return true;
}

Subspace GroupAlgebra::augmentation_ideal() const {
    Subspace s(dim_);
    for (std::uint32_t g = 1; g < dim_; ++g) s.insert(embed_plus_one(g));
    return s;
}

std::vector<std::size_t> GroupAlgebra::Filtration::quotient_dims() const {
    std::vector<std::size_t> q;
    for (std::size_t k = 0; k + 1 < layers.size(); ++k)
        q.push_back(layers[k].dim() - layers[k + 1].dim());
    return q;
}

GroupAlgebra::Filtration GroupAlgebra::ideal_filtration(FiltrationStrategy strat) const {
    Filtration f;
    Subspace full(dim_);
    for (std::uint32_t g = 0; g < dim_; ++g) full.insert(embed(g));
    f.layers.push_back(std::move(full));
    f.layers.push_back(augmentation_ideal());

    while (f.layers.back().dim() > 0) {
        const Subspace& prev = f.layers.back();
        Subspace next(dim_);
        if (strat == FiltrationStrategy::generator_translates) {
            // I^(k+1) = I^k * I and I is generated as a left ideal by the
            // g+1 over the group generators, so products with basis vectors
            // of I^k reduce to w*(g+1) = w*g + w.
            for (const auto& w : prev.basis())
                for (std::size_t i = 0; i < grp_->ngens(); ++i) {
                    const std::uint32_t g = grp_->generator(i);
                    next.insert(right_translate(w, g) ^ w);
                }
        } else {
            const auto& ibasis = f.layers[1].basis();
            next = gf2::product_span(
                std::span<const BitVector>(ibasis), std::span<const BitVector>(prev.basis()),
                dim_, [this](const BitVector& a, const BitVector& b) { return mul(a, b); });
        }
        if (next.dim() >= prev.dim())
            throw std::logic_error("ideal_filtration: filtration failed to descend");
        f.layers.push_back(std::move(next));
    }
    f.nilpotency_index = f.layers.size() - 2;  // last nonzero layer index
    return f;
}

std::vector<pc::Subgroup> GroupAlgebra::dimension_subgroups(const Filtration& f) const {
    std::vector<pc::Subgroup> subs;
    // D_1 = G; then test g + 1 against each deeper layer, keeping survivors.
    std::vector<std::uint32_t> survivors;
    for (std::uint32_t g = 0; g < dim_; ++g) survivors.push_back(g);
    for (std::size_t k = 1; k < f.layers.size(); ++k) {
        const Subspace& layer = f.layers[k];
        std::vector<std::uint32_t> next;
        for (const std::uint32_t g : survivors)
            if (g == 0 || layer.contains(embed_plus_one(g))) next.push_back(g);
        survivors = std::move(next);
        pc::Subgroup d;
        d.elements = survivors;
        subs.push_back(std::move(d));
        if (survivors.size() == 1) break;
    }
    return subs;
}

std::vector<BitVector> GroupAlgebra::class_sums() const {
    std::vector<BitVector> sums;
    for (const auto& cls : pc::conjugacy_classes(*grp_)) {
        BitVector v(dim_);
        for (const std::uint32_t u : cls) v.set(u);
        sums.push_back(std::move(v));
    }
    return sums;
}

Subspace GroupAlgebra::center_basis() const {
    Subspace s(dim_);
    for (const auto& v : class_sums()) s.insert(v);
    return s;
}

Subspace GroupAlgebra::center_kernel() const {
    // v central iff for every generator g the commutator v*g + g*v vanishes;
    // stack the maps v -> v*g + g*v and take the common kernel.
    const std::size_t k = grp_->ngens();
    gf2::Matrix m(dim_, k * dim_ + dim_);
    for (std::uint32_t t = 0; t < dim_; ++t) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint32_t g = grp_->generator(i);
            m.row[t].flip(i * dim_ + grp_->mul(t, g));
            m.row[t].flip(i * dim_ + grp_->mul(g, t));
        }
        m.row[t].set(k * dim_ + t);  // witness block
    }
    const Subspace elim = gf2::rref(m);
    Subspace kernel(dim_);
    for (std::size_t r = 0; r < elim.dim(); ++r) {
        const BitVector& row = elim.basis()[r];
        if (static_cast<std::size_t>(elim.pivots()[r]) >= k * dim_) {
            BitVector v(dim_);
            for (std::size_t c = 0; c < dim_; ++c)
                if (row.get(k * dim_ + c)) v.set(c);
            kernel.insert(std::move(v));
        }
    }
    return kernel;
}

Subspace GroupAlgebra::two_sided_ideal(const BitVector& a) const {
    Subspace s(dim_);
    if (a.none()) return s;
    std::vector<BitVector> frontier;
    s.insert(a);
    frontier.push_back(a);
    while (!frontier.empty()) {
        std::vector<BitVector> next;
        for (const auto& w : frontier)
            for (std::size_t i = 0; i < grp_->ngens(); ++i) {
                const std::uint32_t g = grp_->generator(i);
                for (BitVector cand : {left_translate(g, w), right_translate(w, g)}) {
                    if (s.insert(cand)) next.push_back(std::move(cand));
                }
            }
        frontier = std::move(next);
    }
    return s;
}

Subspace GroupAlgebra::ideal_power(const Subspace& j, unsigned k) const {
    if (k == 0) throw std::invalid_argument("ideal_power: k must be >= 1");
    Subspace acc = j;
    auto mulfn = [this](const BitVector& a, const BitVector& b) { return mul(a, b); };
    for (unsigned t = 1; t < k; ++t) {
        acc = gf2::product_span(std::span<const BitVector>(j.basis()),
                                std::span<const BitVector>(acc.basis()), dim_, mulfn);
        if (acc.dim() == 0) break;
    }
    return acc;
}

Subspace GroupAlgebra::ring_generated_by(std::span<const BitVector> elems,
                                         RingGenStrategy strat) const {
    Subspace s(dim_);
    if (strat == RingGenStrategy::generator_words) {
        // every word in the generators factors as g * (shorter word), so the
        // closure is reached by left multiplication alone
        std::vector<BitVector> frontier;
        for (const auto& e : elems)
            if (s.insert(e)) frontier.push_back(e);
        while (!frontier.empty()) {
            std::vector<BitVector> next;
            for (const auto& g : elems)
                for (const auto& w : frontier) {
                    BitVector p = mul(g, w);
                    if (s.insert(p)) next.push_back(std::move(p));
                }
            frontier = std::move(next);
        }
        return s;
    }
    for (const auto& e : elems) s.insert(e);
    auto mulfn = [this](const BitVector& a, const BitVector& b) { return mul(a, b); };
    while (true) {
        const Subspace prod = gf2::product_span(std::span<const BitVector>(s.basis()),
                                                std::span<const BitVector>(s.basis()), dim_, mulfn);
        const Subspace sum = gf2::subspace_sum(s, prod);
        if (sum.dim() == s.dim()) return s;
        s = sum;
    }
}

std::string GroupAlgebra::format_element(const BitVector& a, std::size_t max_terms) const {
    if (a.none()) return "0";
    std::string out;
    std::size_t shown = 0;
    const std::size_t total = a.popcount();
    a.for_each_set([&](std::size_t i) {
        if (shown >= max_terms) return;
        if (shown) out += " + ";
        out += grp_->element_name(static_cast<std::uint32_t>(i));
        ++shown;
    });
    if (shown < total) out += " + ... (" + std::to_string(total) + " terms)";
    return out;
}

}  // namespace mipcert::alg
