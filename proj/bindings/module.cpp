// Python bindings for the pc-presentation engine and the obstruction
// pipeline. Multiplier orders can exceed int64 in principle, so they cross
// the boundary as decimal strings; Python callers just int() them.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcprobe/corpus.hpp"

namespace py = pybind11;
using namespace pcprobe;

namespace {

std::vector<std::string> factors_str(const AbelianStructure& s) {
  std::vector<std::string> out;
  for (const auto& d : s.torsion) out.push_back(d.get_str());
  return out;
}

}  // namespace

PYBIND11_MODULE(_pcprobe, m) {
  m.doc() = "Obstruction probes for extending free surface actions";

  py::register_exception<ParseError>(m, "PcParseError");
  py::register_exception<GuardExceeded>(m, "GuardExceeded");

  py::class_<PcPresentation>(m, "PcPresentation")
      .def_readonly("name", &PcPresentation::name)
      .def_readonly("n", &PcPresentation::n)
      .def_readonly("rel_orders", &PcPresentation::rel_orders)
      .def("order", &PcPresentation::order)
      .def("__repr__", [](const PcPresentation& p) {
        return "<PcPresentation '" + p.name + "' order " + std::to_string(p.order()) + ">";
      });

  m.def("parse", &parse_pc_presentation, py::arg("text"),
        "Parse a single group stanza in the corpus grammar");
  m.def("parse_corpus", &parse_pc_corpus, py::arg("text"));
  m.def("serialize", &serialize_pc_presentation, py::arg("presentation"));

  m.def(
      "collect",
      [](const PcPresentation& p, const std::vector<std::pair<int, int64_t>>& word) {
        Word w;
        for (auto [g, e] : word) w.push_back({g, e});
        return collect(p, w);
      },
      py::arg("presentation"), py::arg("word"),
      "Collect a word, given as (generator, exponent) pairs, to normal form");
  m.def("multiply", &multiply);
  m.def("inverse", &inverse);
  m.def("commutator", &commutator);
  m.def("element_order", &element_order);
  m.def("is_consistent",
        [](const PcPresentation& p) { return check_consistency(p).empty(); });
  m.def("count_involutions",
        [](const PcPresentation& p) { return count_involutions(p); });

  m.def(
      "schur_multiplier",
      [](const PcPresentation& p) {
        MultiplierData md = schur_multiplier(p);
        return factors_str(md.M);
      },
      "Invariant factors of M(G), as decimal strings");
  m.def(
      "h2_bar_oracle",
      [](const PcPresentation& p) { return factors_str(h2_bar_oracle(p)); },
      "Invariant factors of H2(G;Z) from the bar resolution (|G| <= 32)");

  m.def(
      "toral_subgroup",
      [](const PcPresentation& p) {
        ToralResult t = toral_subgroup(p);
        return py::make_tuple(t.multiplier_order.get_str(), t.toral_order.get_str(),
                              t.toral_generated);
      },
      "(|M(G)|, toral order, generated) for the toral subgroup of M(G)");
  m.def(
      "genus2_subgroup",
      [](const PcPresentation& p, uint64_t seed) {
        Genus2Result g = genus2_subgroup(p, Genus2Strategy::RandomizedThenExhaustive, seed);
        return py::make_tuple(g.genus2_order.get_str(), g.genus2_generated);
      },
      py::arg("presentation"), py::arg("seed") = 0);
  m.def("bogomolov",
        [](const PcPresentation& p) { return factors_str(bogomolov(p)); });
  m.def(
      "verdict",
      [](const PcPresentation& p) {
        Verdict v = verdict(p);
        py::dict d;
        d["kind"] = std::string(to_string(v.kind));
        d["multiplier_order"] = v.multiplier_order.get_str();
        d["toral_generated"] = v.toral_generated;
        d["involution_count"] = v.involution_count;
        d["spherical_possible"] = v.spherical_possible;
        return d;
      });
  m.def("covering_genus", &covering_genus, py::arg("group_order"),
        py::arg("quotient_genus"));
}
