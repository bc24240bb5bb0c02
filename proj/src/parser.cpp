#include "mipcert/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

namespace mipcert::parser {

namespace {

struct LineCursor {
    std::string_view text;
    std::size_t line_no;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    std::size_t column() const { return pos + 1; }

    std::string_view next_token() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') ++pos;
        return text.substr(start, pos - start);
    }
};

std::vector<std::pair<std::size_t, std::string_view>> meaningful_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t line_no = 0;
    while (!text.empty() || line_no == 0) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        const auto is_blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
        if (!is_blank) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
                line.remove_suffix(1);
            out.emplace_back(line_no, line);
        }
        if (nl == std::string_view::npos) break;
    }
    return out;
}

std::int64_t parse_int(std::string_view s, std::size_t line, std::size_t col) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("expected an integer", line, col, std::string(s));
    return v;
}

/// generator token with optional ^exponent; negative exponents reduce modulo
/// the relative order, exponents >= the order are rejected as unreduced
pc::Letter parse_gen_power(std::string_view tok, const pc::PcPresentation& p,
                           std::size_t line, std::size_t col) {
    const auto caret = tok.find('^');
    const std::string_view name = tok.substr(0, caret);
    const int gi = p.gen_index(name);
    if (gi < 0) throw ParseError("unknown generator", line, col, std::string(name));
    std::int64_t e = 1;
    if (caret != std::string_view::npos)
        e = parse_int(tok.substr(caret + 1), line, col + caret + 1);
    const auto order = static_cast<std::int64_t>(p.relative_order(static_cast<std::size_t>(gi)));
    if (e >= order)
        throw ParseError("exponent must be reduced below the relative order " +
                             std::to_string(order),
                         line, col, std::string(tok));
    if (e < 0) e = ((e % order) + order) % order;
    return pc::Letter{gi, e};
}

pc::Word parse_rule_word(LineCursor& cur, const pc::PcPresentation& p) {
    pc::Word w;
    bool saw_one = false;
    while (!cur.done()) {
        const std::size_t col = cur.column();
        const std::string_view tok = cur.next_token();
        if (tok == "1") {
            saw_one = true;
            continue;
        }
        const pc::Letter l = parse_gen_power(tok, p, cur.line_no, col);
        if (l.exp != 0) w.push_back(l);
    }
    if (w.empty() && !saw_one)
        throw ParseError("empty rule word (use 1 for the identity)", cur.line_no,
                         cur.column(), "");
    return w;
}

}  // namespace

PresentationDoc parse_presentation(std::string_view text) {
    const auto lines = meaningful_lines(text);
    if (lines.empty()) throw ParseError("expected 'gens:' line", 1, 1, "");

    std::size_t li = 0;
    auto expect_line = [&](const char* what) -> LineCursor {
        if (li >= lines.size())
            throw ParseError(std::string("missing ") + what,
                             lines.empty() ? 1 : lines.back().first + 1, 1, "");
        LineCursor cur{lines[li].second, lines[li].first};
        ++li;
        return cur;
    };

    LineCursor gl = expect_line("'gens:' line");
    {
        const std::size_t col = gl.column();
        if (gl.next_token() != "gens:")
            throw ParseError("expected 'gens:'", gl.line_no, col, std::string(gl.text));
    }
    std::vector<std::string> names;
    while (!gl.done()) names.emplace_back(gl.next_token());
    if (names.empty()) throw ParseError("no generators listed", gl.line_no, gl.column(), "");

    LineCursor ol = expect_line("'orders:' line");
    {
        const std::size_t col = ol.column();
        if (ol.next_token() != "orders:")
            throw ParseError("expected 'orders:'", ol.line_no, col, std::string(ol.text));
    }
    std::vector<std::uint64_t> orders;
    while (!ol.done()) {
        const std::size_t col = ol.column();
        const std::string_view tok = ol.next_token();
        const std::int64_t v = parse_int(tok, ol.line_no, col);
        if (v < 2 || (v & (v - 1)) != 0)
            throw ParseError("relative order must be a power of 2 and at least 2",
                             ol.line_no, col, std::string(tok));
        orders.push_back(static_cast<std::uint64_t>(v));
    }
    if (orders.size() != names.size())
        throw ParseError("orders count differs from generator count", ol.line_no, 1, "");

    pc::PcPresentation pres(std::move(names), std::move(orders));

    while (li < lines.size()) {
        LineCursor cur{lines[li].second, lines[li].first};
        ++li;
        const std::size_t kw_col = cur.column();
        const std::string_view kw = cur.next_token();
        if (kw == "pow") {
            const std::size_t gcol = cur.column();
            const std::string_view gname = cur.next_token();
            const int gi = pres.gen_index(gname);
            if (gi < 0)
                throw ParseError("unknown generator", cur.line_no, gcol, std::string(gname));
            const std::size_t eqcol = cur.column();
            if (cur.next_token() != "=")
                throw ParseError("expected '='", cur.line_no, eqcol, "");
            const pc::Word rhs = parse_rule_word(cur, pres);
            try {
                pres.set_power_rule(static_cast<std::size_t>(gi), rhs);
            } catch (const std::exception& e) {
                throw ParseError(e.what(), cur.line_no, 1, std::string(lines[li - 1].second));
            }
        } else if (kw == "conj") {
            const std::size_t tcol = cur.column();
            const std::string_view tok = cur.next_token();
            const auto caret = tok.find('^');
            if (caret == std::string_view::npos)
                throw ParseError("expected g^h on the left of a conj rule", cur.line_no,
                                 tcol, std::string(tok));
            const int j = pres.gen_index(tok.substr(0, caret));
            const int i = pres.gen_index(tok.substr(caret + 1));
            if (j < 0 || i < 0)
                throw ParseError("unknown generator", cur.line_no, tcol, std::string(tok));
            if (!(i < j))
                throw ParseError("conj rule must rewrite a later generator by an earlier "
                                 "one (need i < j in g_j^g_i)",
                                 cur.line_no, tcol, std::string(tok));
            const std::size_t eqcol = cur.column();
            if (cur.next_token() != "=")
                throw ParseError("expected '='", cur.line_no, eqcol, "");
            const pc::Word rhs = parse_rule_word(cur, pres);
            try {
                pres.set_conjugation_rule(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(j), rhs);
            } catch (const std::exception& e) {
                throw ParseError(e.what(), cur.line_no, 1, std::string(lines[li - 1].second));
            }
        } else {
            throw ParseError("expected 'pow' or 'conj'", cur.line_no, kw_col,
                             std::string(kw));
        }
    }

    const pc::ConsistencyReport cons = pc::consistency_check(pres);
    if (!cons.ok)
        throw ParseError("inconsistent presentation, first failed overlap: " +
                             cons.failures.front(),
                         0, 0, "");

    return PresentationDoc{std::move(pres), std::string(text)};
}

std::string print_presentation(const pc::PcPresentation& p) {
    std::ostringstream os;
    os << "gens:";
    for (std::size_t i = 0; i < p.ngens(); ++i) os << ' ' << p.name(i);
    os << "\norders:";
    for (std::size_t i = 0; i < p.ngens(); ++i) os << ' ' << p.relative_order(i);
    os << '\n';
    auto word_text = [&p](const pc::Word& w) {
        if (w.empty()) return std::string("1");
        std::string out;
        for (const auto& l : w) {
            if (!out.empty()) out += ' ';
            out += p.name(static_cast<std::size_t>(l.gen));
            if (l.exp != 1) out += '^' + std::to_string(l.exp);
        }
        return out;
    };
    for (std::size_t i = 0; i < p.ngens(); ++i)
        os << "pow " << p.name(i) << " = " << word_text(p.power_rule(i)) << '\n';
    for (std::size_t i = 0; i < p.ngens(); ++i)
        for (std::size_t j = i + 1; j < p.ngens(); ++j)
            if (!p.conjugation_trivial(i, j))
                os << "conj " << p.name(j) << '^' << p.name(i) << " = "
                   << word_text(p.conjugation_rule(i, j)) << '\n';
    return os.str();
}

namespace {

/// Recursive-descent parser for algebra element literals.
class LiteralParser {
public:
    LiteralParser(std::string_view text, const alg::GroupAlgebra& a)
        : text_(text), alg_(a), grp_(a.group()) {}

    alg::BitVector parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", 1, 1, "");
        alg::BitVector v = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError("unexpected trailing input", 1, pos_ + 1,
                             std::string(1, text_[pos_]));
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool at_factor_start() {
        const char c = peek();
        if (c == '(' || c == '1') return true;
        return match_generator(false) >= 0;
    }

    /// longest generator name starting at pos_; consumes it when eat is true
    int match_generator(bool eat) {
        skip_ws();
        int best = -1;
        std::size_t best_len = 0;
        for (std::size_t i = 0; i < grp_.ngens(); ++i) {
            const std::string& nm = grp_.presentation().name(i);
            if (nm.size() > best_len && text_.substr(pos_, nm.size()) == nm) {
                best = static_cast<int>(i);
                best_len = nm.size();
            }
        }
        if (best >= 0 && eat) pos_ += best_len;
        return best;
    }

    std::int64_t parse_int() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ParseError("expected an integer exponent", 1, pos_ + 1, "");
        std::int64_t v = 0;
        const auto sv = text_.substr(start, pos_ - start);
        const auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc{} || p != sv.data() + sv.size())
            throw ParseError("bad integer", 1, start + 1, std::string(sv));
        return v;
    }

    alg::BitVector parse_expr() {
        alg::BitVector v = parse_term();
        while (peek() == '+') {
            ++pos_;
            v ^= parse_term();
        }
        return v;
    }

    alg::BitVector parse_term() {
        alg::BitVector v = parse_factor();
        while (true) {
            if (peek() == '*') {
                ++pos_;
                v = alg_.mul(v, parse_factor());
            } else if (at_factor_start()) {
                v = alg_.mul(v, parse_factor());
            } else {
                break;
            }
        }
        return v;
    }

    alg::BitVector parse_factor() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            alg::BitVector v = parse_expr();
            if (peek() != ')')
                throw ParseError("expected ')'", 1, pos_ + 1,
                                 pos_ < text_.size() ? std::string(1, text_[pos_]) : "");
            ++pos_;
            return v;
        }
        if (c == '1') {
            ++pos_;
            return alg_.one();
        }
        const std::size_t col = pos_ + 1;
        const int gi = match_generator(true);
        if (gi < 0)
            throw ParseError("expected a generator, '(' or '1'", 1, col,
                             pos_ < text_.size() ? std::string(1, text_[pos_]) : "");
        std::int64_t e = 1;
        if (peek() == '^') {
            ++pos_;
            e = parse_int();
        }
        const std::uint32_t g =
            grp_.power(grp_.generator(static_cast<std::size_t>(gi)), e);
        return alg_.embed(g);
    }

    std::string_view text_;
    const alg::GroupAlgebra& alg_;
    const pc::Group& grp_;
    std::size_t pos_ = 0;
};

}  // namespace

alg::BitVector parse_algebra_literal(std::string_view text, const alg::GroupAlgebra& a) {
    return LiteralParser(text, a).parse();
}

}  // namespace mipcert::parser
