// SPDX-License-Identifier: Apache-2.0
#include "dsd/molgraph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace dsd {

namespace {

bool is_organic_two_letter(const std::string& s, std::size_t i, std::string& out) {
  if (i + 1 < s.size()) {
    std::string two = s.substr(i, 2);
    if (two == "Cl" || two == "Br") {
      out = two;
      return true;
    }
  }
  return false;
}

bool is_organic_one_letter(char c) {
  switch (c) {
    case 'B': case 'C': case 'N': case 'O': case 'P': case 'S':
    case 'F': case 'I':
      return true;
    default:
      return false;
  }
}

bool is_aromatic_symbol(char c) {
  switch (c) {
    case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
      return true;
    default:
      return false;
  }
}

double order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 1.0;
}

double max_valence(const Atom& a) {
  const std::string& el = a.element;
  double v;
  if (el == "C") v = 4;
  else if (el == "N") v = 3;
  else if (el == "O") v = 2;
  else if (el == "B") v = 3;
  else if (el == "P") v = 5;
  else if (el == "S") v = 6;
  else if (el == "H" || el == "F" || el == "Cl" || el == "Br" || el == "I") v = 1;
  else v = 8;
  if (a.formal_charge > 0 && (el == "N" || el == "P")) v += a.formal_charge;
  else if (a.formal_charge < 0) v += a.formal_charge;
  return v;
}

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
};

struct ParserState {
  MolecularGraph g;
  std::vector<bool> from_bracket;
  std::vector<int> branch_stack;
  int prev_atom = -1;
  std::optional<BondOrder> pending;
  std::map<int, RingOpening> open_rings;
};

void add_bond(ParserState& st, int a, int b, std::optional<BondOrder> lhs,
              std::optional<BondOrder> rhs) {
  if (a == b) throw SyntaxError("self-bond");
  if (st.g.bonded(a, b)) throw SyntaxError("duplicate bond between atoms");
  BondOrder order;
  if (lhs && rhs) {
    if (*lhs != *rhs) throw SyntaxError("conflicting ring-closure bond orders");
    order = *lhs;
  } else if (lhs) {
    order = *lhs;
  } else if (rhs) {
    order = *rhs;
  } else {
    bool both_arom = st.g.atoms[std::size_t(a)].is_aromatic &&
                     st.g.atoms[std::size_t(b)].is_aromatic;
    order = both_arom ? BondOrder::Aromatic : BondOrder::Single;
  }
  Bond bond;
  bond.a = a;
  bond.b = b;
  bond.order = order;
  st.g.bonds.push_back(bond);
}

int add_atom(ParserState& st, Atom a, bool bracket) {
  st.g.atoms.push_back(std::move(a));
  st.from_bracket.push_back(bracket);
  int idx = int(st.g.atoms.size()) - 1;
  if (st.prev_atom >= 0) {
    add_bond(st, st.prev_atom, idx, st.pending, std::nullopt);
  } else if (st.pending) {
    throw SyntaxError("bond symbol with no preceding atom");
  }
  st.pending.reset();
  st.prev_atom = idx;
  return idx;
}

// [isotope? symbol chirality? Hcount? charge?]
Atom parse_bracket(const std::string& s, std::size_t& i) {
  ++i;  // consume '['
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;  // isotope ignored
  if (i >= s.size()) throw SyntaxError("unterminated bracket atom");
  Atom a;
  std::string el;
  if (is_organic_two_letter(s, i, el)) {
    i += 2;
  } else if (std::isupper(static_cast<unsigned char>(s[i]))) {
    el = s[i];
    if (el != "B" && el != "C" && el != "N" && el != "O" && el != "P" &&
        el != "S" && el != "F" && el != "I" && el != "H")
      throw SyntaxError("unsupported element in bracket: " + el);
    ++i;
  } else if (is_aromatic_symbol(s[i])) {
    el = char(std::toupper(static_cast<unsigned char>(s[i])));
    a.is_aromatic = true;
    ++i;
  } else {
    throw SyntaxError(std::string("unexpected character in bracket: ") + s[i]);
  }
  a.element = el;
  a.atomic_number = atomic_number_of(el);
  if (i < s.size() && s[i] == '@') {
    ++i;
    if (i < s.size() && s[i] == '@') {
      a.chirality = Chirality::Clockwise;
      ++i;
    } else {
      a.chirality = Chirality::CounterClockwise;
    }
  }
  if (i < s.size() && s[i] == 'H') {
    ++i;
    int h = 1;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      h = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        h = h * 10 + (s[i++] - '0');
    }
    a.explicit_h = h;
  }
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    char sign = s[i];
    int mag = 1;
    ++i;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mag = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        mag = mag * 10 + (s[i++] - '0');
    } else {
      while (i < s.size() && s[i] == sign) {
        ++mag;
        ++i;
      }
    }
    a.formal_charge = sign == '+' ? mag : -mag;
    if (a.formal_charge < -4 || a.formal_charge > 4)
      throw SyntaxError("formal charge out of range");
  }
  if (i >= s.size() || s[i] != ']')
    throw SyntaxError("expected ']' to close bracket atom");
  ++i;
  return a;
}

}  // namespace

MolecularGraph parse_smiles(const std::string& text) {
  if (text.empty()) throw SyntaxError("empty input");
  ParserState st;
  std::size_t i = 0;
  const std::string& s = text;
  while (i < s.size()) {
    char c = s[i];
    if (c == '[') {
      add_atom(st, parse_bracket(s, i), true);
    } else if (c == '-') {
      if (st.pending) throw SyntaxError("consecutive bond symbols");
      st.pending = BondOrder::Single;
      ++i;
    } else if (c == '=') {
      if (st.pending) throw SyntaxError("consecutive bond symbols");
      st.pending = BondOrder::Double;
      ++i;
    } else if (c == '#') {
      if (st.pending) throw SyntaxError("consecutive bond symbols");
      st.pending = BondOrder::Triple;
      ++i;
    } else if (c == ':') {
      if (st.pending) throw SyntaxError("consecutive bond symbols");
      st.pending = BondOrder::Aromatic;
      ++i;
    } else if (c == '(') {
      if (st.prev_atom < 0) throw SyntaxError("branch with no preceding atom");
      if (st.pending) throw SyntaxError("bond symbol before '('");
      st.branch_stack.push_back(st.prev_atom);
      ++i;
    } else if (c == ')') {
      if (st.branch_stack.empty()) throw SyntaxError("unbalanced ')'");
      if (st.pending) throw SyntaxError("dangling bond symbol before ')'");
      st.prev_atom = st.branch_stack.back();
      st.branch_stack.pop_back();
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      int digit;
      if (c == '%') {
        if (i + 2 >= s.size() ||
            !std::isdigit(static_cast<unsigned char>(s[i + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s[i + 2])))
          throw SyntaxError("'%' ring closure needs two digits");
        digit = (s[i + 1] - '0') * 10 + (s[i + 2] - '0');
        i += 3;
      } else {
        digit = c - '0';
        ++i;
      }
      if (st.prev_atom < 0)
        throw SyntaxError("ring closure with no preceding atom");
      auto it = st.open_rings.find(digit);
      if (it == st.open_rings.end()) {
        st.open_rings[digit] = RingOpening{st.prev_atom, st.pending};
        st.pending.reset();
      } else {
        RingOpening open = it->second;
        st.open_rings.erase(it);
        add_bond(st, open.atom, st.prev_atom, open.order, st.pending);
        st.pending.reset();
      }
    } else if (is_aromatic_symbol(c)) {
      Atom a;
      a.element = char(std::toupper(static_cast<unsigned char>(c)));
      a.atomic_number = atomic_number_of(a.element);
      a.is_aromatic = true;
      add_atom(st, a, false);
      ++i;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string el;
      if (is_organic_two_letter(s, i, el)) {
        i += 2;
      } else if (is_organic_one_letter(c)) {
        el = c;
        ++i;
      } else {
        throw SyntaxError(std::string("unknown atom symbol: ") + c);
      }
      Atom a;
      a.element = el;
      a.atomic_number = atomic_number_of(el);
      add_atom(st, a, false);
    } else if (c == '.') {
      throw SyntaxError("dot-disconnected inputs are not supported");
    } else {
      throw SyntaxError(std::string("unexpected character: ") + c);
    }
  }
  if (!st.branch_stack.empty()) throw SyntaxError("unbalanced '('");
  if (st.pending) throw SyntaxError("dangling bond symbol at end of input");
  if (!st.open_rings.empty())
    throw RingClosureError("unmatched ring closure digit " +
                           std::to_string(st.open_rings.begin()->first));
  if (st.g.atoms.empty()) throw SyntaxError("no atoms in input");

  MolecularGraph& g = st.g;
  // valence check on explicit bonds; aromatic bonds count 1 here so that
  // ring-fusion atoms (three aromatic bonds) pass
  for (int a = 0; a < int(g.num_atoms()); ++a) {
    double sum = g.atoms[std::size_t(a)].explicit_h;
    for (const Bond& b : g.bonds)
      if (b.a == a || b.b == a)
        sum += b.order == BondOrder::Aromatic ? 1.0 : order_value(b.order);
    if (sum > max_valence(g.atoms[std::size_t(a)]) + 1e-9)
      throw ValenceError("explicit bonds exceed allowed valence on atom " +
                         std::to_string(a) + " (" + g.atoms[std::size_t(a)].element + ")");
  }
  perceive_rings(g);
  for (int a = 0; a < int(g.num_atoms()); ++a) {
    Atom& at = g.atoms[std::size_t(a)];
    at.implicit_h = st.from_bracket[std::size_t(a)]
                        ? 0
                        : implicit_hydrogens(at, g.bond_order_sum(a));
  }
  // conjugation: aromatic bonds, and multiple bonds adjacent to another
  // multiple/aromatic bond
  auto is_multiple = [](BondOrder o) {
    return o == BondOrder::Double || o == BondOrder::Triple ||
           o == BondOrder::Aromatic;
  };
  for (Bond& b : g.bonds) {
    if (b.order == BondOrder::Aromatic) {
      b.is_conjugated = true;
      continue;
    }
    if (!is_multiple(b.order)) continue;
    for (const Bond& o : g.bonds) {
      if (&o == &b || !is_multiple(o.order)) continue;
      if (o.a == b.a || o.a == b.b || o.b == b.a || o.b == b.b) {
        b.is_conjugated = true;
        break;
      }
    }
  }
  return g;
}

namespace {

// Plain (non-bracket) token is legal when the implied implicit-H count
// reproduces the atom's actual hydrogen total.
bool needs_bracket(const MolecularGraph& g, int idx) {
  const Atom& a = g.atoms[std::size_t(idx)];
  if (a.formal_charge != 0 || a.chirality != Chirality::None ||
      a.radical_electrons != 0)
    return true;
  if (a.element != "B" && a.element != "C" && a.element != "N" &&
      a.element != "O" && a.element != "P" && a.element != "S" &&
      a.element != "F" && a.element != "Cl" && a.element != "Br" &&
      a.element != "I")
    return true;
  if (a.is_aromatic && a.element != "B" && a.element != "C" &&
      a.element != "N" && a.element != "O" && a.element != "P" &&
      a.element != "S")
    return true;
  Atom probe = a;
  probe.explicit_h = 0;
  return implicit_hydrogens(probe, g.bond_order_sum(idx)) != a.total_h();
}

std::string atom_token(const MolecularGraph& g, int idx) {
  const Atom& a = g.atoms[std::size_t(idx)];
  if (a.radical_electrons != 0)
    throw UnsupportedFeature("radical atoms are not writable");
  std::string sym = a.element;
  if (a.is_aromatic) {
    if (sym.size() != 1)
      throw UnsupportedFeature("aromatic " + sym + " is not writable");
    sym[0] = char(std::tolower(static_cast<unsigned char>(sym[0])));
  }
  if (!needs_bracket(g, idx)) return sym;
  std::ostringstream os;
  os << '[' << sym;
  if (a.chirality == Chirality::CounterClockwise) os << '@';
  if (a.chirality == Chirality::Clockwise) os << "@@";
  int h = a.total_h();
  if (h == 1) os << 'H';
  else if (h > 1) os << 'H' << h;
  if (a.formal_charge > 0) {
    os << '+';
    if (a.formal_charge > 1) os << a.formal_charge;
  } else if (a.formal_charge < 0) {
    os << '-';
    if (a.formal_charge < -1) os << -a.formal_charge;
  }
  os << ']';
  return os.str();
}

std::string bond_token(const MolecularGraph& g, const Bond& b) {
  bool both_arom = g.atoms[std::size_t(b.a)].is_aromatic &&
                   g.atoms[std::size_t(b.b)].is_aromatic;
  switch (b.order) {
    case BondOrder::Single: return both_arom ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic: return both_arom ? "" : ":";
  }
  return "";
}

}  // namespace


std::string write_smiles(const MolecularGraph& g) {
  if (g.has_virtual_node)
    throw UnsupportedFeature("cannot write a virtual-node-augmented graph");
  if (g.atoms.empty()) throw UnsupportedFeature("empty graph");

  int n = int(g.num_atoms());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));  // incident bond indices
  for (int bi = 0; bi < int(g.bonds.size()); ++bi) {
    adj[std::size_t(g.bonds[std::size_t(bi)].a)].push_back(bi);
    adj[std::size_t(g.bonds[std::size_t(bi)].b)].push_back(bi);
  }

  // spanning-tree pre-pass; non-tree bonds become ring closures
  std::vector<bool> is_ring_bond(g.bonds.size(), false);
  {
    std::vector<bool> seen(std::size_t(n), false);
    std::vector<bool> tree(g.bonds.size(), false);
    std::function<void(int)> dfs = [&](int v) {
      seen[std::size_t(v)] = true;
      for (int bi : adj[std::size_t(v)]) {
        const Bond& b = g.bonds[std::size_t(bi)];
        int u = b.a == v ? b.b : b.a;
        if (!seen[std::size_t(u)]) {
          tree[std::size_t(bi)] = true;
          dfs(u);
        }
      }
    };
    dfs(0);
    for (int v = 0; v < n; ++v)
      if (!seen[std::size_t(v)])
        throw UnsupportedFeature("disconnected graphs are not writable");
    for (std::size_t bi = 0; bi < g.bonds.size(); ++bi)
      is_ring_bond[bi] = !tree[bi];
  }

  std::set<int> used_digits;
  auto alloc_digit = [&]() {
    for (int d = 1; d <= 99; ++d)
      if (!used_digits.count(d)) {
        used_digits.insert(d);
        return d;
      }
    throw UnsupportedFeature("more than 99 simultaneously open ring closures");
  };
  auto emit_digit = [](std::ostringstream& os, int d) {
    if (d >= 10) os << '%' << d;
    else os << d;
  };

  std::vector<bool> visited(std::size_t(n), false);
  std::vector<bool> traversed(g.bonds.size(), false);
  std::map<int, int> open_digit;  // ring bond index -> digit
  std::ostringstream out;

  std::function<void(int, int)> emit = [&](int v, int from_bond) {
    visited[std::size_t(v)] = true;
    if (from_bond >= 0) out << bond_token(g, g.bonds[std::size_t(from_bond)]);
    out << atom_token(g, v);
    for (int bi : adj[std::size_t(v)]) {
      if (!is_ring_bond[std::size_t(bi)] || traversed[std::size_t(bi)]) continue;
      auto it = open_digit.find(bi);
      if (it == open_digit.end()) {
        int d = alloc_digit();
        open_digit[bi] = d;
        emit_digit(out, d);
      } else {
        out << bond_token(g, g.bonds[std::size_t(bi)]);
        emit_digit(out, it->second);
        used_digits.erase(it->second);
        open_digit.erase(it);
        traversed[std::size_t(bi)] = true;
      }
    }
    std::vector<int> children;
    for (int bi : adj[std::size_t(v)]) {
      if (bi == from_bond || is_ring_bond[std::size_t(bi)] ||
          traversed[std::size_t(bi)])
        continue;
      const Bond& b = g.bonds[std::size_t(bi)];
      int u = b.a == v ? b.b : b.a;
      if (!visited[std::size_t(u)]) children.push_back(bi);
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      int bi = children[k];
      const Bond& b = g.bonds[std::size_t(bi)];
      int u = b.a == v ? b.b : b.a;
      traversed[std::size_t(bi)] = true;
      bool last = (k + 1 == children.size());
      if (!last) out << '(';
      emit(u, bi);
      if (!last) out << ')';
    }
  };
  emit(0, -1);
  return out.str();
}

}  // namespace dsd
