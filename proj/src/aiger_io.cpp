#include "sksynth/aiger_io.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sksynth/errors.hpp"

namespace sksynth {

std::string write_aag(AigManager& m, std::span<const NamedRoot> outputs,
                      std::span<const VarId> extra_inputs) {
  std::set<VarId> input_set(extra_inputs.begin(), extra_inputs.end());
  for (const auto& out : outputs)
    for (VarId v : m.support(out.root)) input_set.insert(v);
  const std::vector<VarId> inputs(input_set.begin(), input_set.end());

  // aag literal per node index: inputs 2..2I, ANDs following in topo order
  std::unordered_map<std::uint32_t, unsigned> lit_of;
  lit_of.emplace(0u, 0u);
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    const NodeRef leaf = m.mk_var(inputs[j]);
    lit_of.emplace(leaf.index(), static_cast<unsigned>(2 * (j + 1)));
  }

  struct AndLine {
    unsigned lhs, rhs0, rhs1;
  };
  std::vector<AndLine> ands;
  unsigned next_var = static_cast<unsigned>(inputs.size());

  std::vector<std::uint32_t> stack;
  for (const auto& out : outputs) stack.push_back(out.root.index());
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    if (lit_of.find(n) != lit_of.end()) {
      stack.pop_back();
      continue;
    }
    const NodeRef nref = NodeRef::from_raw(n << 1);
    const NodeRef f0 = m.fanin0(nref);
    const NodeRef f1 = m.fanin1(nref);
    const auto i0 = lit_of.find(f0.index());
    const auto i1 = lit_of.find(f1.index());
    if (i0 == lit_of.end() || i1 == lit_of.end()) {
      if (i0 == lit_of.end()) stack.push_back(f0.index());
      if (i1 == lit_of.end()) stack.push_back(f1.index());
      continue;
    }
    const unsigned lhs = 2 * ++next_var;
    unsigned rhs0 = i0->second ^ (f0.complemented() ? 1u : 0u);
    unsigned rhs1 = i1->second ^ (f1.complemented() ? 1u : 0u);
    if (rhs0 < rhs1) std::swap(rhs0, rhs1);
    ands.push_back({lhs, rhs0, rhs1});
    lit_of.emplace(n, lhs);
    stack.pop_back();
  }

  std::ostringstream out;
  out << "aag " << next_var << ' ' << inputs.size() << " 0 " << outputs.size() << ' '
      << ands.size() << '\n';
  for (std::size_t j = 0; j < inputs.size(); ++j) out << 2 * (j + 1) << '\n';
  for (const auto& o : outputs) {
    const unsigned lit = lit_of.at(o.root.index()) ^ (o.root.complemented() ? 1u : 0u);
    out << lit << '\n';
  }
  for (const auto& a : ands) out << a.lhs << ' ' << a.rhs0 << ' ' << a.rhs1 << '\n';
  for (std::size_t j = 0; j < inputs.size(); ++j)
    out << 'i' << j << ' ' << m.var_name(inputs[j]) << '\n';
  for (std::size_t j = 0; j < outputs.size(); ++j) out << 'o' << j << ' ' << outputs[j].name << '\n';
  return out.str();
}

std::vector<NamedRoot> read_aag(AigManager& m, const std::string& text,
                                const std::unordered_map<std::string, VarId>& name_to_var) {
  std::istringstream in(text);
  std::string magic;
  unsigned max_var = 0, num_in = 0, num_latch = 0, num_out = 0, num_and = 0;
  if (!(in >> magic >> max_var >> num_in >> num_latch >> num_out >> num_and) || magic != "aag")
    throw ParseError("expected `aag M I L O A` header", 1);
  if (num_latch != 0) throw ParseError("sequential AIGER (latches) not supported", 1);

  std::vector<unsigned> input_lits(num_in);
  for (auto& lit : input_lits) {
    if (!(in >> lit) || lit == 0 || lit % 2 != 0 || lit / 2 > max_var)
      throw ParseError("bad input literal", 1);
  }
  std::vector<unsigned> output_lits(num_out);
  for (auto& lit : output_lits) {
    if (!(in >> lit) || lit / 2 > max_var) throw ParseError("bad output literal", 1);
  }
  struct Def {
    unsigned rhs0, rhs1;
  };
  std::unordered_map<unsigned, Def> defs;  // lhs variable -> fanins
  for (unsigned i = 0; i < num_and; ++i) {
    unsigned lhs, rhs0, rhs1;
    if (!(in >> lhs >> rhs0 >> rhs1) || lhs == 0 || lhs % 2 != 0 || lhs / 2 > max_var)
      throw ParseError("bad and-gate line", 1);
    defs.emplace(lhs / 2, Def{rhs0, rhs1});
  }

  // symbol table
  std::unordered_map<unsigned, std::string> in_names, out_names;
  std::string line;
  std::getline(in, line);  // rest of the last numeric line
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') break;
    std::istringstream ls(line);
    std::string tag, name;
    ls >> tag;
    std::getline(ls >> std::ws, name);
    if (tag.size() < 2 || (tag[0] != 'i' && tag[0] != 'o')) continue;
    const unsigned pos = static_cast<unsigned>(std::stoul(tag.substr(1)));
    (tag[0] == 'i' ? in_names : out_names)[pos] = name;
  }

  // bind inputs by name
  std::unordered_map<unsigned, NodeRef> built;  // aag variable -> ref
  for (unsigned j = 0; j < num_in; ++j) {
    auto nm = in_names.find(j);
    if (nm == in_names.end())
      throw UsageError("input " + std::to_string(j) + " has no symbol name to bind");
    auto it = name_to_var.find(nm->second);
    if (it == name_to_var.end())
      throw UsageError("input name `" + nm->second + "` is not a known variable");
    built.emplace(input_lits[j] / 2, m.mk_var(it->second));
  }

  // resolve gates (aag permits any order; recurse with an explicit stack)
  auto resolve = [&](unsigned var) {
    std::vector<unsigned> stack{var};
    while (!stack.empty()) {
      const unsigned v = stack.back();
      if (v == 0 || built.find(v) != built.end()) {
        stack.pop_back();
        continue;
      }
      auto d = defs.find(v);
      if (d == defs.end())
        throw ParseError("literal " + std::to_string(2 * v) + " is never defined", 1);
      if (stack.size() > defs.size() + 2) throw ParseError("cyclic and-gate definitions", 1);
      const unsigned v0 = d->second.rhs0 / 2, v1 = d->second.rhs1 / 2;
      const bool need0 = v0 != 0 && built.find(v0) == built.end();
      const bool need1 = v1 != 0 && built.find(v1) == built.end();
      if (need0 || need1) {
        if (need0) stack.push_back(v0);
        if (need1) stack.push_back(v1);
        continue;
      }
      auto ref_of = [&](unsigned lit) {
        const NodeRef base = lit / 2 == 0 ? AigManager::false_ref() : built.at(lit / 2);
        return base.apply_complement(lit & 1u);
      };
      built.emplace(v, m.mk_and(ref_of(d->second.rhs0), ref_of(d->second.rhs1)));
      stack.pop_back();
    }
  };

  std::vector<NamedRoot> outputs;
  for (unsigned j = 0; j < num_out; ++j) {
    resolve(output_lits[j] / 2);
    const NodeRef base =
        output_lits[j] / 2 == 0 ? AigManager::false_ref() : built.at(output_lits[j] / 2);
    auto nm = out_names.find(j);
    outputs.push_back(NamedRoot{nm != out_names.end() ? nm->second : "o" + std::to_string(j),
                                base.apply_complement(output_lits[j] & 1u)});
  }
  return outputs;
}

std::string write_dot(AigManager& m, std::span<const NamedRoot> roots) {
  std::ostringstream out;
  out << "digraph aig {\n  rankdir=BT;\n";
  std::set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack;
  for (const auto& r : roots) stack.push_back(r.root.index());
  while (!stack.empty()) {
    const std::uint32_t n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    const NodeRef nref = NodeRef::from_raw(n << 1);
    if (n == 0) {
      out << "  n0 [label=\"0\", shape=box];\n";
    } else if (m.is_var_node(nref)) {
      out << "  n" << n << " [label=\"" << m.var_name(m.var_of(nref)) << "\", shape=box];\n";
    } else {
      out << "  n" << n << " [label=\"&\", shape=circle];\n";
      for (const NodeRef child : {m.fanin0(nref), m.fanin1(nref)}) {
        out << "  n" << n << " -> n" << child.index()
            << (child.complemented() ? " [style=dashed];\n" : ";\n");
        stack.push_back(child.index());
      }
    }
  }
  for (std::size_t j = 0; j < roots.size(); ++j) {
    out << "  out" << j << " [label=\"" << roots[j].name << "\", shape=plaintext];\n";
    out << "  out" << j << " -> n" << roots[j].root.index()
        << (roots[j].root.complemented() ? " [style=dashed];\n" : ";\n");
  }
  out << "}\n";
  return out.str();
}

}  // namespace sksynth
