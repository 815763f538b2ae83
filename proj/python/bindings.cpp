#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <vector>

#include "ccs/amp.hpp"
#include "ccs/channel.hpp"
#include "ccs/fwht.hpp"
#include "ccs/harness.hpp"
#include "ccs/outer_code.hpp"
#include "ccs/params.hpp"

namespace py = pybind11;
using namespace ccs;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  std::vector<double> v(size_t(a.size()));
  std::memcpy(v.data(), a.data(), size_t(a.size()) * sizeof(double));
  return v;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(py::ssize_t(v.size()));
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
  return a;
}

Payload to_payload(const py::bytes& b) {
  std::string s = b;
  return Payload(s.begin(), s.end());
}

py::bytes from_payload(const Payload& p) {
  return py::bytes(reinterpret_cast<const char*>(p.data()), p.size());
}

}  // namespace

PYBIND11_MODULE(ccsura, m) {
  m.doc() = "Coded compressed sensing unsourced random access: AMP decoders, "
            "outer graph code, and link-level simulation";

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](int k, int w, int l, int v, int n, int iters, int list_size,
                       int beam_cap) {
             SystemParams p;
             p.num_users = k;
             p.payload_bits = w;
             p.num_sections = l;
             p.section_bits = v;
             p.num_rows = n;
             p.amp_iters = iters;
             p.list_size = list_size;
             p.beam_cap = beam_cap;
             return p;
           }),
           py::arg("k") = 100, py::arg("w") = 128, py::arg("l") = 16, py::arg("v") = 16,
           py::arg("n") = 38400, py::arg("iters") = 10, py::arg("list_size") = 0,
           py::arg("beam_cap") = 0)
      .def_readwrite("k", &SystemParams::num_users)
      .def_readwrite("w", &SystemParams::payload_bits)
      .def_readwrite("l", &SystemParams::num_sections)
      .def_readwrite("v", &SystemParams::section_bits)
      .def_readwrite("n", &SystemParams::num_rows)
      .def_readwrite("iters", &SystemParams::amp_iters)
      .def_readwrite("list_size", &SystemParams::list_size)
      .def_readwrite("beam_cap", &SystemParams::beam_cap)
      .def("validate", &SystemParams::validate)
      .def_property_readonly("width", &SystemParams::width);

  py::class_<PowerProfile>(m, "PowerProfile")
      .def_static("uniform", &PowerProfile::uniform, py::arg("params"), py::arg("ebn0_db"))
      .def_readonly("amplitude", &PowerProfile::amplitude)
      .def_readonly("symbol_energy", &PowerProfile::symbol_energy)
      .def_readonly("ebn0_db", &PowerProfile::ebn0_db)
      .def("total_energy", &PowerProfile::total_energy);

  py::class_<OuterGraph>(m, "OuterGraph")
      .def_static("ring", &OuterGraph::ring, py::arg("l"), py::arg("v"))
      .def_static("edgeless", &OuterGraph::edgeless, py::arg("l"), py::arg("v"))
      .def_readonly("l", &OuterGraph::num_sections)
      .def_readonly("v", &OuterGraph::section_bits)
      .def_property_readonly("checks",
                             [](const OuterGraph& g) {
                               std::vector<std::tuple<int, int, int>> out;
                               for (const Check& c : g.checks)
                                 out.emplace_back(c.op_a, c.op_b, c.parity);
                               return out;
                             })
      .def_property_readonly("payload_bytes", &OuterGraph::payload_bytes);

  py::enum_<SensingKind>(m, "SensingKind")
      .value("Dense", SensingKind::Dense)
      .value("BlockDiagonal", SensingKind::BlockDiagonal);

  py::class_<SensingOperator>(m, "SensingOperator")
      .def_property_readonly("kind", &SensingOperator::kind)
      .def_property_readonly("rows", &SensingOperator::rows)
      .def_property_readonly("width", &SensingOperator::width)
      .def("forward",
           [](const SensingOperator& op, const py::array_t<double>& x) {
             return to_array(op.forward(to_vector(x)));
           })
      .def("adjoint", [](const SensingOperator& op, const py::array_t<double>& z) {
        return to_array(op.adjoint(to_vector(z)));
      });

  m.def("fwht", [](const py::array_t<double>& x) {
    std::vector<double> v = to_vector(x);
    fwht_inplace(v);
    return to_array(v);
  });

  m.def("make_operator", &make_operator, py::arg("kind"), py::arg("params"), py::arg("seed"));

  m.def("encode", [](const py::bytes& payload, const OuterGraph& g) {
    return encode(to_payload(payload), g);
  });
  m.def("index_map", &index_map, py::arg("values"), py::arg("graph"));
  m.def("checks_satisfied", &checks_satisfied, py::arg("values"), py::arg("graph"));

  py::enum_<CheckDirection>(m, "CheckDirection")
      .value("ToParity", CheckDirection::ToParity)
      .value("ToOperand", CheckDirection::ToOperand);

  m.def("check_to_var",
        [](const py::array_t<double>& mu1, const py::array_t<double>& mu2, CheckDirection dir) {
          return to_array(check_to_var(to_vector(mu1), to_vector(mu2), dir));
        });

  m.def("bp_denoise",
        [](const py::array_t<double>& r, double tau, const std::vector<double>& amplitude,
           int num_users, const OuterGraph& g) {
          return to_array(bp_denoise(to_vector(r), tau, amplitude, num_users, g));
        },
        py::arg("r"), py::arg("tau"), py::arg("amplitude"), py::arg("num_users"),
        py::arg("graph"));

  m.def("stitch",
        [](const py::array_t<double>& shat, const OuterGraph& g, int num_users, int list_size,
           int beam_cap) {
          std::vector<py::bytes> out;
          for (const Payload& p : stitch(to_vector(shat), g, num_users, list_size, beam_cap))
            out.push_back(from_payload(p));
          return out;
        },
        py::arg("shat"), py::arg("graph"), py::arg("num_users"), py::arg("list_size"),
        py::arg("beam_cap"));

  m.def("pme", &pme, py::arg("r"), py::arg("d"), py::arg("tau"), py::arg("q"));
  m.def("tau_update",
        [](const py::array_t<double>& z, size_t n_rows) { return tau_update(to_vector(z), n_rows); });
  m.def("separable_prior", &separable_prior);

  py::class_<Trial>(m, "Trial")
      .def_property_readonly("payloads",
                             [](const Trial& t) {
                               std::vector<py::bytes> out;
                               for (const Payload& p : t.payloads) out.push_back(from_payload(p));
                               return out;
                             })
      .def_property_readonly("y", [](const Trial& t) { return to_array(t.y); })
      .def_readonly("seed", &Trial::seed);

  m.def("gen_trial", &gen_trial, py::arg("params"), py::arg("profile"), py::arg("graph"),
        py::arg("op"), py::arg("seed"), py::arg("noiseless") = false);

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("pupe", &ErrorReport::pupe)
      .def_readonly("missed", &ErrorReport::missed)
      .def_readonly("false_alarms", &ErrorReport::false_alarms)
      .def_readonly("decoded_count", &ErrorReport::decoded_count);

  m.def("pupe", [](const std::vector<py::bytes>& tx, const std::vector<py::bytes>& rx) {
    std::vector<Payload> t, r;
    for (const auto& p : tx) t.push_back(to_payload(p));
    for (const auto& p : rx) r.push_back(to_payload(p));
    return pupe(t, r);
  });

  m.def("run_pipeline",
        [](int case_id, const py::array_t<double>& y, const SystemParams& params,
           const PowerProfile& profile, const OuterGraph& g, const SensingOperator& op) {
          PipelineResult res = run_pipeline(case_id, to_vector(y), params, profile, g, op);
          std::vector<py::bytes> decoded;
          for (const Payload& p : res.decoded) decoded.push_back(from_payload(p));
          return py::make_tuple(to_array(res.shat), decoded);
        },
        py::arg("case_id"), py::arg("y"), py::arg("params"), py::arg("profile"),
        py::arg("graph"), py::arg("op"));

  py::class_<PointResult>(m, "PointResult")
      .def_readonly("mean_pupe", &PointResult::mean_pupe)
      .def_readonly("stderr_pupe", &PointResult::stderr_pupe)
      .def_readonly("mean_decode_seconds", &PointResult::mean_decode_seconds);

  m.def("run_point",
        [](int case_id, double ebn0_db, int trials, uint64_t base_seed,
           const SystemParams& params, bool noiseless) {
          return run_point(case_id, ebn0_db, trials, base_seed, params, nullptr, noiseless);
        },
        py::arg("case_id"), py::arg("ebn0_db"), py::arg("trials"), py::arg("base_seed"),
        py::arg("params"), py::arg("noiseless") = false);

#ifdef CCSURA_VERSION
  m.attr("__version__") = CCSURA_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
