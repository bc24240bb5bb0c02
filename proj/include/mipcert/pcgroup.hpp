#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mipcert::pc {

/// One syllable of a word: generator index and (possibly negative) exponent.
struct Letter {
    int gen;
    std::int64_t exp;
    bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

/// Reverses the word and negates exponents.
Word inverse_word(const Word& w);

/// Consistent polycyclic presentation of a finite 2-group: ordered generators
/// with power-of-2 relative orders, a power rule g_i^{o_i} = w_i (a normal
/// word in generators > i) and conjugation rules g_j^{g_i} = w_ij for i < j
/// (normal words in generators > i).  Construction validates shape only;
/// consistency_check() decides whether collection yields unique normal forms.
class PcPresentation {
public:
    PcPresentation(std::vector<std::string> names, std::vector<std::uint64_t> orders);

    std::size_t ngens() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    int gen_index(std::string_view name) const;  // -1 when unknown
    std::uint64_t relative_order(std::size_t i) const { return orders_[i]; }
    const std::vector<std::uint64_t>& relative_orders() const { return orders_; }
    std::uint64_t group_order() const { return order_; }

    /// Normal word equal to g_i^{o_i}; empty = identity.
    const Word& power_rule(std::size_t i) const { return power_[i]; }
    /// Normal word equal to g_j^{g_i} for i < j; defaults to the trivial rule g_j.
    const Word& conjugation_rule(std::size_t i, std::size_t j) const;
    bool conjugation_trivial(std::size_t i, std::size_t j) const;

    void set_power_rule(std::size_t i, Word rhs);
    void set_conjugation_rule(std::size_t i, std::size_t j, Word rhs);

    bool operator==(const PcPresentation&) const = default;

private:
    void validate_rule_word(const Word& w, std::size_t min_gen, const char* what) const;

    std::vector<std::string> names_;
    std::vector<std::uint64_t> orders_;
    std::uint64_t order_ = 1;
    std::vector<Word> power_;                // per generator
    std::vector<std::vector<Word>> conj_;    // conj_[i][j] for i < j
};

/// Presentation of G(n, m) = < x, y, z | z = [y,x], x^(2^n) = y^(2^m) = z^4 = 1,
/// z^x = z^-1, z^y = z^-1 >, realized with conjugation rules y^x = y z,
/// z^x = z^3, z^y = z^3.  Requires n > m > 2.
PcPresentation build_G(int n, int m);
/// Presentation of H(n, m) = < a, b, c | c = [b,a], a^(2^n) = b^(2^m) = c^4 = 1,
/// c^a = c^-1, c^b = c >, with rules b^a = b c, c^a = c^3 (c^b trivial).
PcPresentation build_H(int n, int m);

/// Group element in collected normal form: exponent vector with
/// 0 <= e[i] < relative_order(i).  Equality of elements is vector equality.
struct Element {
    std::vector<std::uint32_t> e;
    bool operator==(const Element&) const = default;
};

/// Collects an arbitrary word to its unique normal form (collection from the
/// left).  Negative exponents are handled via the power rules.
Element collect(const Word& w, const PcPresentation& p);

struct ConsistencyReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Checks the standard polycyclic consistency equations by collecting both
/// associations of every overlap:
///   g_k (g_j g_i) = (g_k g_j) g_i         for k > j > i
///   g_j^{o_j} g_i = g_j^{o_j-1} (g_j g_i) for j > i
///   g_j g_i^{o_i} = (g_j g_i) g_i^{o_i-1} for j > i
///   g_i g_i^{o_i} = g_i^{o_i} g_i         for all i
ConsistencyReport consistency_check(const PcPresentation& p);

/// Finite 2-group materialized from a presentation: element indices are the
/// mixed-radix encoding of normal forms (leftmost generator most significant),
/// so index 0 is the identity and indices enumerate all normal forms.
/// Right-multiplication-by-generator tables are always built; the full
/// |G| x |G| multiplication table is materialized when |G| <= table_limit.
/// Immutable after construction; all member functions are const and safe to
/// call concurrently.
class Group {
public:
    static constexpr std::uint64_t kTableLimit = 1u << 12;
    static constexpr std::uint64_t kOrderLimit = 1u << 22;

    explicit Group(PcPresentation p);

    const PcPresentation& presentation() const { return pres_; }
    std::uint64_t order() const { return order_; }
    std::size_t ngens() const { return pres_.ngens(); }
    bool has_table() const { return !table_.empty(); }
    const std::vector<std::uint16_t>& table() const { return table_; }

    std::uint32_t identity() const { return 0; }
    std::uint32_t generator(std::size_t i) const { return gen_index_[i]; }

    std::uint32_t mul(std::uint32_t u, std::uint32_t v) const {
        if (!table_.empty()) return table_[static_cast<std::size_t>(u) * order_ + v];
        return mul_lazy(u, v);
    }
    std::uint32_t inverse(std::uint32_t u) const { return inverse_[u]; }
    /// u^h = h^-1 u h
    std::uint32_t conjugate(std::uint32_t u, std::uint32_t h) const {
        return mul(mul(inverse(h), u), h);
    }
    /// [u, v] = u^-1 v^-1 u v
    std::uint32_t commutator(std::uint32_t u, std::uint32_t v) const {
        return mul(mul(mul(inverse(u), inverse(v)), u), v);
    }
    std::uint32_t power(std::uint32_t u, std::int64_t k) const;
    /// Least k >= 1 with u^k = 1, found by repeated squaring (orders are
    /// powers of 2 here).
    std::uint64_t element_order(std::uint32_t u) const;

    std::uint64_t index_of(const Element& el) const;
    Element element_at(std::uint64_t idx) const;
    /// All elements in index order (index 0 = identity).
    std::vector<Element> enumerate_elements() const;

    std::uint32_t collect_word(const Word& w) const;

    /// Printable normal form, e.g. "x^2*y*z^3"; identity prints "1".
    std::string element_name(std::uint32_t u) const;

    /// Right multiplication by generator i as a permutation table (always built).
    const std::vector<std::uint32_t>& right_gen(std::size_t i) const { return right_gen_[i]; }

    /// Multiplication table builders, exposed for the benchmark and the
    /// serial-vs-parallel kernel tests.
    std::vector<std::uint16_t> build_table(bool parallel) const;

private:
    std::uint32_t mul_lazy(std::uint32_t u, std::uint32_t v) const;

    PcPresentation pres_;
    std::uint64_t order_;
    std::vector<std::uint64_t> place_;              // mixed-radix place values
    std::vector<std::uint32_t> gen_index_;          // index of each generator
    std::vector<std::vector<std::uint32_t>> right_gen_;
    std::vector<std::vector<std::vector<std::uint32_t>>> right_pow_;  // [i][t]: by g_i^(2^t), lazy mode
    std::vector<std::uint32_t> parent_idx_;         // mixed-radix parent, for table fill
    std::vector<std::uint8_t> parent_gen_;
    std::vector<std::uint16_t> table_;
    std::vector<std::uint32_t> inverse_;
};

/// Subgroup given by generators plus its full element set (sorted indices).
struct Subgroup {
    std::vector<std::uint32_t> generators;
    std::vector<std::uint32_t> elements;

    std::uint64_t order() const { return elements.size(); }
    bool contains(std::uint32_t u) const;
};

/// Closure of the generated subgroup under right multiplication (breadth
/// first; sufficient in a finite group).
Subgroup subgroup_closure(const Group& g, std::span<const std::uint32_t> gens);

/// Normal closure of the commutators of all generator pairs.
Subgroup derived_subgroup(const Group& g);
Subgroup center(const Group& g);
/// Elements commuting with every element of xs.
Subgroup centralizer(const Group& g, std::span<const std::uint32_t> xs);
Subgroup centralizer(const Group& g, const Subgroup& s);
/// Frattini subgroup of a 2-group: closure of squares and commutators.
Subgroup frattini(const Group& g);

std::uint64_t subgroup_exponent(const Group& g, const Subgroup& s);
bool is_abelian(const Group& g, const Subgroup& s);
bool is_cyclic(const Group& g, const Subgroup& s);

/// Partition of all elements into conjugation orbits; classes ordered by
/// their smallest member, members sorted.
std::vector<std::vector<std::uint32_t>> conjugacy_classes(const Group& g);

}  // namespace mipcert::pc
