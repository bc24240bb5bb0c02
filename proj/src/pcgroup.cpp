#include "mipcert/pcgroup.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mipcert::pc {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

Word word_of(const Element& el) {
    Word w;
    for (std::size_t i = 0; i < el.e.size(); ++i)
        if (el.e[i] != 0) w.push_back({static_cast<int>(i), el.e[i]});
    return w;
}

Word concat(Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

Word inverse_word(const Word& w) {
    Word inv;
    inv.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) inv.push_back({it->gen, -it->exp});
    return inv;
}

PcPresentation::PcPresentation(std::vector<std::string> names,
                               std::vector<std::uint64_t> orders)
    : names_(std::move(names)), orders_(std::move(orders)) {
    if (names_.empty()) throw std::invalid_argument("presentation: no generators");
    if (names_.size() != orders_.size())
        throw std::invalid_argument("presentation: generator/order count mismatch");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw std::invalid_argument("presentation: empty generator name");
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j])
                throw std::invalid_argument("presentation: duplicate generator '" + names_[i] + "'");
        if (orders_[i] < 2 || !is_power_of_two(orders_[i]))
            throw std::invalid_argument("presentation: relative order of '" + names_[i] +
                                        "' must be a power of 2 and at least 2");
        if (order_ > (std::uint64_t{1} << 62) / orders_[i])
            throw std::invalid_argument("presentation: group order overflows");
        order_ *= orders_[i];
    }
    power_.assign(names_.size(), Word{});
    conj_.resize(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        conj_[i].resize(names_.size());
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            conj_[i][j] = Word{{static_cast<int>(j), 1}};
    }
}

int PcPresentation::gen_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

const Word& PcPresentation::conjugation_rule(std::size_t i, std::size_t j) const {
    if (!(i < j && j < ngens()))
        throw std::out_of_range("conjugation_rule: need i < j < ngens");
    return conj_[i][j];
}

bool PcPresentation::conjugation_trivial(std::size_t i, std::size_t j) const {
    const Word& w = conjugation_rule(i, j);
    return w.size() == 1 && w[0].gen == static_cast<int>(j) && w[0].exp == 1;
}

void PcPresentation::validate_rule_word(const Word& w, std::size_t min_gen,
                                        const char* what) const {
    int last = -1;
    for (const auto& l : w) {
        if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= ngens())
            throw std::invalid_argument(std::string(what) + ": unknown generator index");
        if (static_cast<std::size_t>(l.gen) < min_gen)
            throw std::invalid_argument(std::string(what) +
                                        ": right-hand side uses a generator below the "
                                        "rewritten one (normal-form convention)");
        if (l.gen <= last)
            throw std::invalid_argument(std::string(what) + ": right-hand side not a normal word");
        if (l.exp < 1 || static_cast<std::uint64_t>(l.exp) >= orders_[static_cast<std::size_t>(l.gen)])
            throw std::invalid_argument(std::string(what) + ": exponent out of range");
        last = l.gen;
    }
}

void PcPresentation::set_power_rule(std::size_t i, Word rhs) {
    if (i >= ngens()) throw std::out_of_range("set_power_rule");
    validate_rule_word(rhs, i + 1, "power rule");
    power_[i] = std::move(rhs);
}

void PcPresentation::set_conjugation_rule(std::size_t i, std::size_t j, Word rhs) {
    if (!(i < j && j < ngens()))
        throw std::invalid_argument("set_conjugation_rule: need i < j < ngens");
    validate_rule_word(rhs, i + 1, "conjugation rule");
    if (rhs.empty())
        throw std::invalid_argument("conjugation rule: right-hand side cannot be the identity");
    conj_[i][j] = std::move(rhs);
}

PcPresentation build_G(int n, int m) {
    if (!(n > m && m > 2))
        throw std::invalid_argument("build_G: parameters must satisfy n > m > 2 (got n=" +
                                    std::to_string(n) + ", m=" + std::to_string(m) + ")");
    if (n > 40) throw std::invalid_argument("build_G: n too large");
    PcPresentation p({"x", "y", "z"},
                     {std::uint64_t{1} << n, std::uint64_t{1} << m, 4});
    p.set_conjugation_rule(0, 1, {{1, 1}, {2, 1}});  // y^x = y z  (realizes z = [y,x])
    p.set_conjugation_rule(0, 2, {{2, 3}});          // z^x = z^-1
    p.set_conjugation_rule(1, 2, {{2, 3}});          // z^y = z^-1
    return p;
}

PcPresentation build_H(int n, int m) {
    if (!(n > m && m > 2))
        throw std::invalid_argument("build_H: parameters must satisfy n > m > 2 (got n=" +
                                    std::to_string(n) + ", m=" + std::to_string(m) + ")");
    if (n > 40) throw std::invalid_argument("build_H: n too large");
    PcPresentation p({"a", "b", "c"},
                     {std::uint64_t{1} << n, std::uint64_t{1} << m, 4});
    p.set_conjugation_rule(0, 1, {{1, 1}, {2, 1}});  // b^a = b c  (realizes c = [b,a])
    p.set_conjugation_rule(0, 2, {{2, 3}});          // c^a = c^-1
    // c^b = c: trivial rule, the default
    return p;
}

Element collect(const Word& w, const PcPresentation& p) {
    const std::size_t k = p.ngens();
    std::vector<Letter> W;
    W.reserve(w.size() + 8);
    for (const auto& l : w) {
        if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= k)
            throw std::invalid_argument("collect: word references unknown generator");
        if (l.exp != 0) W.push_back(l);
    }

    std::size_t t = 0;
    while (t < W.size()) {
        const std::size_t g = static_cast<std::size_t>(W[t].gen);
        const std::int64_t o = static_cast<std::int64_t>(p.relative_order(g));
        if (W[t].exp == 0) {
            W.erase(W.begin() + static_cast<std::ptrdiff_t>(t));
            if (t > 0) --t;
            continue;
        }
        if (t + 1 < W.size() && W[t + 1].gen == W[t].gen) {
            W[t].exp += W[t + 1].exp;
            W.erase(W.begin() + static_cast<std::ptrdiff_t>(t) + 1);
            continue;
        }
        if (W[t].exp >= o) {
            // g^e = g^(e-o) * w  with g^o = w
            W[t].exp -= o;
            const Word& pw = p.power_rule(g);
            W.insert(W.begin() + static_cast<std::ptrdiff_t>(t) + 1, pw.begin(), pw.end());
            continue;
        }
        if (W[t].exp < 0) {
            // g^e = g^(e+o) * w^-1
            W[t].exp += o;
            const Word inv = inverse_word(p.power_rule(g));
            W.insert(W.begin() + static_cast<std::ptrdiff_t>(t) + 1, inv.begin(), inv.end());
            continue;
        }
        if (t + 1 < W.size() && W[t + 1].gen < W[t].gen) {
            // normalize the right letter first so that 0 < f < o_i below
            {
                Letter& next = W[t + 1];
                const std::size_t gi = static_cast<std::size_t>(next.gen);
                const std::int64_t oi = static_cast<std::int64_t>(p.relative_order(gi));
                if (next.exp == 0) {
                    W.erase(W.begin() + static_cast<std::ptrdiff_t>(t) + 1);
                    continue;
                }
                if (next.exp >= oi) {
                    next.exp -= oi;
                    const Word& pw = p.power_rule(gi);
                    W.insert(W.begin() + static_cast<std::ptrdiff_t>(t) + 2, pw.begin(),
                             pw.end());
                    continue;
                }
                if (next.exp < 0) {
                    next.exp += oi;
                    const Word inv = inverse_word(p.power_rule(gi));
                    W.insert(W.begin() + static_cast<std::ptrdiff_t>(t) + 2, inv.begin(),
                             inv.end());
                    continue;
                }
            }
            // g_j^e * g_i^f  ->  g_i * (g_j^{g_i})^e * g_i^(f-1)
            const Letter hi = W[t];
            const Letter lo = W[t + 1];
            const std::size_t i = static_cast<std::size_t>(lo.gen);
            const std::size_t j = static_cast<std::size_t>(hi.gen);
            if (p.conjugation_trivial(i, j)) {
                W[t] = lo;
                W[t + 1] = hi;
            } else {
                const Word& rule = p.conjugation_rule(i, j);
                Word repl;
                repl.reserve(2 + rule.size() * static_cast<std::size_t>(hi.exp));
                repl.push_back({lo.gen, 1});
                for (std::int64_t c = 0; c < hi.exp; ++c)
                    repl.insert(repl.end(), rule.begin(), rule.end());
                if (lo.exp != 1) repl.push_back({lo.gen, lo.exp - 1});
                W.erase(W.begin() + static_cast<std::ptrdiff_t>(t),
                        W.begin() + static_cast<std::ptrdiff_t>(t) + 2);
                W.insert(W.begin() + static_cast<std::ptrdiff_t>(t), repl.begin(), repl.end());
            }
            if (t > 0) --t;
            continue;
        }
        ++t;
    }

    Element el;
    el.e.assign(k, 0);
    for (const auto& l : W) el.e[static_cast<std::size_t>(l.gen)] = static_cast<std::uint32_t>(l.exp);
    return el;
}

ConsistencyReport consistency_check(const PcPresentation& p) {
    ConsistencyReport rep;
    const std::size_t k = p.ngens();
    auto gen1 = [](std::size_t i) { return Word{{static_cast<int>(i), 1}}; };
    auto check = [&](const Word& lhs, const Word& rhs, const std::string& eq) {
        const Element a = collect(lhs, p);
        const Element b = collect(rhs, p);
        if (!(a == b)) {
            rep.ok = false;
            rep.failures.push_back(eq);
        }
    };
    auto nf = [&](Word w) { return word_of(collect(w, p)); };

    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            for (std::size_t l = j + 1; l < k; ++l)
                check(concat(gen1(l), nf(concat(gen1(j), gen1(i)))),
                      concat(nf(concat(gen1(l), gen1(j))), gen1(i)),
                      p.name(l) + "*(" + p.name(j) + "*" + p.name(i) + ") = (" + p.name(l) +
                          "*" + p.name(j) + ")*" + p.name(i));

    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const std::int64_t oj = static_cast<std::int64_t>(p.relative_order(j));
            const std::int64_t oi = static_cast<std::int64_t>(p.relative_order(i));
            check(concat(p.power_rule(j), gen1(i)),
                  concat(Word{{static_cast<int>(j), oj - 1}}, nf(concat(gen1(j), gen1(i)))),
                  p.name(j) + "^" + std::to_string(oj) + "*" + p.name(i) + " overlap");
            check(concat(gen1(j), p.power_rule(i)),
                  concat(nf(concat(gen1(j), gen1(i))), Word{{static_cast<int>(i), oi - 1}}),
                  p.name(j) + "*" + p.name(i) + "^" + std::to_string(oi) + " overlap");
        }

    for (std::size_t i = 0; i < k; ++i)
        check(concat(gen1(i), p.power_rule(i)), concat(p.power_rule(i), gen1(i)),
              p.name(i) + "*" + p.name(i) + "^" + std::to_string(p.relative_order(i)) +
                  " overlap");

    return rep;
}

Group::Group(PcPresentation p) : pres_(std::move(p)), order_(pres_.group_order()) {
    if (order_ > kOrderLimit)
        throw std::invalid_argument("group order " + std::to_string(order_) +
                                    " exceeds the materialization limit 2^18");
    const std::size_t k = pres_.ngens();
    place_.assign(k, 1);
    for (std::size_t i = k; i-- > 1;) place_[i - 1] = place_[i] * pres_.relative_order(i);
    gen_index_.resize(k);
    for (std::size_t i = 0; i < k; ++i) gen_index_[i] = static_cast<std::uint32_t>(place_[i]);

    right_gen_.assign(k, std::vector<std::uint32_t>(order_));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t u = 0; u < order_; ++u) {
            Word w = word_of(element_at(u));
            w.push_back({static_cast<int>(i), 1});
            right_gen_[i][u] = static_cast<std::uint32_t>(index_of(collect(w, pres_)));
        }
    }

    if (order_ <= kTableLimit) {
        parent_idx_.resize(order_);
        parent_gen_.resize(order_);
        for (std::uint64_t v = 1; v < order_; ++v) {
            const Element el = element_at(v);
            // least significant nonzero digit
            std::size_t d = k;
            for (std::size_t i = k; i-- > 0;) {
                if (el.e[i] != 0) {
                    d = i;
                    break;
                }
            }
            parent_idx_[v] = static_cast<std::uint32_t>(v - place_[d]);
            parent_gen_[v] = static_cast<std::uint8_t>(d);
        }
        table_ = build_table(true);
    } else {
        right_pow_.assign(k, {});
        for (std::size_t i = 0; i < k; ++i) {
            const unsigned levels = static_cast<unsigned>(std::bit_width(pres_.relative_order(i) - 1));
            right_pow_[i].resize(levels);
            right_pow_[i][0] = right_gen_[i];
            for (unsigned t = 1; t < levels; ++t) {
                right_pow_[i][t].resize(order_);
                const auto& prev = right_pow_[i][t - 1];
                for (std::uint64_t u = 0; u < order_; ++u)
                    right_pow_[i][t][u] = prev[prev[u]];
            }
        }
    }

    inverse_.resize(order_);
    inverse_[0] = 0;
    for (std::uint64_t u = 1; u < order_; ++u) {
        const std::uint64_t ord = element_order(static_cast<std::uint32_t>(u));
        inverse_[u] = power(static_cast<std::uint32_t>(u), static_cast<std::int64_t>(ord - 1));
    }
}

std::vector<std::uint16_t> Group::build_table(bool parallel) const {
    if (order_ > kTableLimit) throw std::logic_error("build_table: group too large");
    std::vector<std::uint16_t> t(order_ * order_);
    const std::int64_t n = static_cast<std::int64_t>(order_);
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t u = 0; u < n; ++u) {
        std::uint16_t* row = &t[static_cast<std::size_t>(u) * order_];
        row[0] = static_cast<std::uint16_t>(u);
        for (std::uint64_t v = 1; v < order_; ++v)
            row[v] = static_cast<std::uint16_t>(right_gen_[parent_gen_[v]][row[parent_idx_[v]]]);
    }
    (void)parallel;
    return t;
}

std::uint32_t Group::mul_lazy(std::uint32_t u, std::uint32_t v) const {
    const Element el = element_at(v);
    std::uint32_t r = u;
    for (std::size_t i = 0; i < el.e.size(); ++i) {
        std::uint32_t e = el.e[i];
        for (unsigned t = 0; e; ++t, e >>= 1)
            if (e & 1) r = right_pow_[i][t][r];
    }
    return r;
}

std::uint32_t Group::power(std::uint32_t u, std::int64_t k) const {
    if (k < 0) return power(inverse_[u], -k);
    std::uint32_t acc = 0;
    std::uint32_t sq = u;
    std::uint64_t e = static_cast<std::uint64_t>(k);
    while (e) {
        if (e & 1) acc = mul(acc, sq);
        e >>= 1;
        if (e) sq = mul(sq, sq);
    }
    return acc;
}

std::uint64_t Group::element_order(std::uint32_t u) const {
    std::uint64_t ord = 1;
    std::uint32_t w = u;
    while (w != 0) {
        w = mul(w, w);
        ord <<= 1;
        if (ord > order_) throw std::logic_error("element_order: order does not divide |G|");
    }
    return ord;
}

std::uint64_t Group::index_of(const Element& el) const {
    if (el.e.size() != pres_.ngens()) throw std::invalid_argument("index_of: wrong arity");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < el.e.size(); ++i) {
        if (el.e[i] >= pres_.relative_order(i))
            throw std::invalid_argument("index_of: exponent out of range");
        idx += el.e[i] * place_[i];
    }
    return idx;
}

Element Group::element_at(std::uint64_t idx) const {
    if (idx >= order_) throw std::out_of_range("element_at");
    Element el;
    el.e.resize(pres_.ngens());
    for (std::size_t i = 0; i < el.e.size(); ++i) {
        el.e[i] = static_cast<std::uint32_t>(idx / place_[i]);
        idx %= place_[i];
    }
    return el;
}

std::vector<Element> Group::enumerate_elements() const {
    std::vector<Element> out;
    out.reserve(order_);
    for (std::uint64_t i = 0; i < order_; ++i) out.push_back(element_at(i));
    return out;
}

std::uint32_t Group::collect_word(const Word& w) const {
    return static_cast<std::uint32_t>(index_of(collect(w, pres_)));
}

std::string Group::element_name(std::uint32_t u) const {
    const Element el = element_at(u);
    std::string out;
    for (std::size_t i = 0; i < el.e.size(); ++i) {
        if (el.e[i] == 0) continue;
        if (!out.empty()) out += '*';
        out += pres_.name(i);
        if (el.e[i] > 1) out += '^' + std::to_string(el.e[i]);
    }
    return out.empty() ? "1" : out;
}

bool Subgroup::contains(std::uint32_t u) const {
    return std::binary_search(elements.begin(), elements.end(), u);
}

Subgroup subgroup_closure(const Group& g, std::span<const std::uint32_t> gens) {
    std::vector<char> seen(g.order(), 0);
    std::deque<std::uint32_t> queue;
    seen[0] = 1;
    queue.push_back(0);
    while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop_front();
        for (const std::uint32_t s : gens) {
            const std::uint32_t w = g.mul(u, s);
            if (!seen[w]) {
                seen[w] = 1;
                queue.push_back(w);
            }
        }
    }
    Subgroup sub;
    sub.generators.assign(gens.begin(), gens.end());
    for (std::uint32_t u = 0; u < g.order(); ++u)
        if (seen[u]) sub.elements.push_back(u);
    return sub;
}

namespace {

/// Greedy reduction of an element set to a short generating list.
std::vector<std::uint32_t> small_generating_set(const Group& g,
                                                const std::vector<std::uint32_t>& elems) {
    std::vector<std::uint32_t> gens;
    Subgroup sofar = subgroup_closure(g, gens);
    for (const std::uint32_t u : elems) {
        if (!sofar.contains(u)) {
            gens.push_back(u);
            sofar = subgroup_closure(g, gens);
            if (sofar.order() == elems.size()) break;
        }
    }
    return gens;
}

}  // namespace

Subgroup derived_subgroup(const Group& g) {
    std::vector<std::uint32_t> work;
    for (std::size_t i = 0; i < g.ngens(); ++i)
        for (std::size_t j = i + 1; j < g.ngens(); ++j) {
            const std::uint32_t c = g.commutator(g.generator(i), g.generator(j));
            if (c != 0) work.push_back(c);
        }
    // normal closure: conjugating the generating set by group generators
    Subgroup sub = subgroup_closure(g, work);
    for (std::size_t i = 0; i < work.size(); ++i) {
        for (std::size_t gi = 0; gi < g.ngens(); ++gi) {
            const std::uint32_t c = g.conjugate(work[i], g.generator(gi));
            if (!sub.contains(c)) {
                work.push_back(c);
                sub = subgroup_closure(g, work);
            }
        }
    }
    sub.generators = small_generating_set(g, sub.elements);
    return sub;
}

Subgroup center(const Group& g) {
    std::vector<std::uint32_t> elems;
    for (std::uint32_t u = 0; u < g.order(); ++u) {
        bool central = true;
        for (std::size_t i = 0; i < g.ngens() && central; ++i) {
            const std::uint32_t s = g.generator(i);
            central = g.mul(u, s) == g.mul(s, u);
        }
        if (central) elems.push_back(u);
    }
    Subgroup sub;
    sub.elements = std::move(elems);
    sub.generators = small_generating_set(g, sub.elements);
    return sub;
}

Subgroup centralizer(const Group& g, std::span<const std::uint32_t> xs) {
    std::vector<std::uint32_t> elems;
    for (std::uint32_t u = 0; u < g.order(); ++u) {
        bool commutes = true;
        for (const std::uint32_t s : xs) {
            if (g.mul(u, s) != g.mul(s, u)) {
                commutes = false;
                break;
            }
        }
        if (commutes) elems.push_back(u);
    }
    Subgroup sub;
    sub.elements = std::move(elems);
    sub.generators = small_generating_set(g, sub.elements);
    return sub;
}

Subgroup centralizer(const Group& g, const Subgroup& s) {
    return centralizer(g, std::span<const std::uint32_t>(s.generators));
}

Subgroup frattini(const Group& g) {
    std::vector<std::uint32_t> gens = derived_subgroup(g).generators;
    std::vector<char> have(g.order(), 0);
    for (const auto u : gens) have[u] = 1;
    for (std::uint32_t u = 0; u < g.order(); ++u) {
        const std::uint32_t sq = g.mul(u, u);
        if (!have[sq]) {
            have[sq] = 1;
            gens.push_back(sq);
        }
    }
    Subgroup sub = subgroup_closure(g, gens);
    sub.generators = small_generating_set(g, sub.elements);
    return sub;
}

std::uint64_t subgroup_exponent(const Group& g, const Subgroup& s) {
    std::uint64_t exp = 1;
    for (const std::uint32_t u : s.elements) exp = std::max(exp, g.element_order(u));
    return exp;
}

bool is_abelian(const Group& g, const Subgroup& s) {
    const auto& gens = s.generators;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (g.mul(gens[i], gens[j]) != g.mul(gens[j], gens[i])) return false;
    return true;
}

bool is_cyclic(const Group& g, const Subgroup& s) {
    for (const std::uint32_t u : s.elements)
        if (g.element_order(u) == s.order()) return true;
    return false;
}

std::vector<std::vector<std::uint32_t>> conjugacy_classes(const Group& g) {
    std::vector<char> seen(g.order(), 0);
    std::vector<std::vector<std::uint32_t>> classes;
    for (std::uint32_t u = 0; u < g.order(); ++u) {
        if (seen[u]) continue;
        std::vector<std::uint32_t> orbit;
        std::deque<std::uint32_t> queue;
        seen[u] = 1;
        queue.push_back(u);
        while (!queue.empty()) {
            const std::uint32_t v = queue.front();
            queue.pop_front();
            orbit.push_back(v);
            for (std::size_t i = 0; i < g.ngens(); ++i) {
                const std::uint32_t c = g.conjugate(v, g.generator(i));
                if (!seen[c]) {
                    seen[c] = 1;
                    queue.push_back(c);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        classes.push_back(std::move(orbit));
    }
    return classes;
}

}  // namespace mipcert::pc
