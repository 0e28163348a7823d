#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "hdtta/errors.hpp"
#include "hdtta/gradcheck.hpp"
#include "hdtta/io.hpp"
#include "hdtta/losses.hpp"
#include "hdtta/metrics.hpp"
#include "hdtta/phantom.hpp"
#include "hdtta/pipeline.hpp"

namespace py = pybind11;
using namespace hdtta;

namespace {

using Spacing = std::array<double, 3>;
using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// numpy arrays are (z, y, x), C order, which is the library's x-fastest layout.
Grid grid_of(const py::buffer_info& b, const Spacing& s) {
  if (b.ndim != 3) throw InvalidArgument("expected a 3-d array shaped (nz, ny, nx)");
  return Grid({std::size_t(b.shape[2]), std::size_t(b.shape[1]), std::size_t(b.shape[0])}, s);
}

Volume to_volume(const F64& a, const Spacing& s) {
  const auto b = a.request();
  const Grid g = grid_of(b, s);
  const auto* p = static_cast<const double*>(b.ptr);
  return Volume(g, std::vector<double>(p, p + g.size()));
}

Mask to_mask(const py::array& a, const Spacing& s) {
  const py::object src = a.dtype().kind() == 'b' ? a.attr("astype")("uint8") : py::object(a);
  const U8 u = U8::ensure(src);
  if (!u) throw InvalidArgument("mask must be convertible to uint8");
  const auto b = u.request();
  const Grid g = grid_of(b, s);
  const auto* p = static_cast<const std::uint8_t*>(b.ptr);
  return Mask(g, std::vector<std::uint8_t>(p, p + g.size()));
}

std::vector<py::ssize_t> shape_of(const Grid& g) {
  return {py::ssize_t(g.nz()), py::ssize_t(g.ny()), py::ssize_t(g.nx())};
}

py::array_t<double> from_volume(const Volume& v) {
  py::array_t<double> out(shape_of(v.grid()));
  std::copy(v.storage().begin(), v.storage().end(), out.mutable_data());
  return out;
}

py::array_t<bool> from_mask(const Mask& m) {
  py::array_t<bool> out(shape_of(m.grid()));
  auto* p = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i];
  return out;
}

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  if (o.is_none()) return nlohmann::json::object();
  return nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(o)).cast<std::string>());
}

Case make_case(const std::vector<F64>& image, const F64& logits, const Spacing& s, const std::string& id) {
  Case c;
  c.id = id;
  c.logits0 = to_volume(logits, s);
  for (const auto& ch : image) c.image.push_back(to_volume(ch, s));
  return c;
}

py::tuple loss_pair(const LossTermResult& r) { return py::make_tuple(r.value, from_volume(r.grad_z)); }

}  // namespace

PYBIND11_MODULE(_hdtta, m) {
  m.doc() = "Hypothesis-driven logit refinement for 3-D tumour segmentation";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  const Spacing unit{1.0, 1.0, 1.0};

  m.def("default_config", [] { return to_py(io::to_json(PipelineConfig{})); });

  m.def(
      "gate",
      [](const F64& p0, const py::object& config) {
        const auto cfg = io::pipeline_config_from_json(from_py(config));
        return to_py(io::to_json(gate(to_volume(p0, {1, 1, 1}), cfg.gate)));
      },
      py::arg("p0"), py::arg("config") = py::none());

  m.def(
      "run_case",
      [](const std::vector<F64>& image, const F64& logits, const Spacing& spacing, const py::object& config,
         const std::string& case_id) {
        const Case c = make_case(image, logits, spacing, case_id);
        const auto cfg = io::pipeline_config_from_json(from_py(config));
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_case(c, cfg);
        }
        return py::make_tuple(from_mask(r.final_mask), to_py(io::to_json(r)));
      },
      py::arg("image"), py::arg("logits"), py::arg("spacing") = unit, py::arg("config") = py::none(),
      py::arg("case_id") = "case");

  m.def(
      "compact_loss",
      [](const F64& z, const F64& z0, const Spacing& s, const py::object& config) {
        const auto cfg = io::pipeline_config_from_json(from_py(config));
        return loss_pair(compact_loss(to_volume(z, s), to_volume(z0, s), cfg.compact));
      },
      py::arg("z"), py::arg("z0"), py::arg("spacing") = unit, py::arg("config") = py::none());

  m.def(
      "diffuse_loss",
      [](const F64& z, const F64& z0, const F64& g, const Spacing& s, const py::object& config) {
        const auto cfg = io::pipeline_config_from_json(from_py(config));
        return loss_pair(diffuse_loss(to_volume(z, s), to_volume(z0, s), to_volume(g, s), cfg.diffuse));
      },
      py::arg("z"), py::arg("z0"), py::arg("g"), py::arg("spacing") = unit, py::arg("config") = py::none());

  m.def(
      "edge_map",
      [](const std::vector<F64>& image, const Spacing& s, const py::object& config) {
        const auto cfg = io::pipeline_config_from_json(from_py(config));
        std::vector<Volume> ch;
        for (const auto& a : image) ch.push_back(to_volume(a, s));
        return from_volume(edge_map(ch, cfg.edge));
      },
      py::arg("image"), py::arg("spacing") = unit, py::arg("config") = py::none());

  m.def(
      "metrics",
      [](const py::array& pred, const py::array& gt, const Spacing& s) {
        return to_py(io::to_json(evaluate(to_mask(pred, s), to_mask(gt, s))));
      },
      py::arg("pred"), py::arg("gt"), py::arg("spacing") = unit);

  m.def(
      "wilcoxon",
      [](const std::vector<double>& diffs, const std::string& alternative) {
        const Alternative alt = alternative == "less" ? Alternative::less : Alternative::greater;
        if (alternative != "less" && alternative != "greater")
          throw InvalidArgument("alternative must be 'greater' or 'less'");
        return to_py(io::to_json(wilcoxon_signed_rank(diffs, alt)));
      },
      py::arg("diffs"), py::arg("alternative") = "greater");

  m.def("holm", [](const std::vector<double>& p) { return holm_adjust(p); }, py::arg("p_values"));

  m.def(
      "phantom",
      [](const std::string& scenario, std::uint64_t seed, const py::object& spec) {
        PhantomSpec s = io::phantom_spec_from_json(from_py(spec));
        s.scenario = scenario_from_string(scenario);
        s.seed = seed;
        const Phantom p = generate(s);
        py::list image;
        for (const auto& ch : p.case_data.image) image.append(from_volume(ch));
        py::dict d;
        d["image"] = image;
        d["logits"] = from_volume(p.case_data.logits0);
        d["gt"] = from_mask(p.gt);
        d["spacing"] = p.gt.grid().spacing;
        d["expected_flagged"] = p.annotations.expected_flagged;
        d["island_voxels"] = p.annotations.island_voxels;
        d["rim_voxels"] = p.annotations.rim_voxels;
        d["shell_voxels"] = p.annotations.shell_voxels;
        d["spec"] = to_py(io::to_json(s));
        return d;
      },
      py::arg("scenario"), py::arg("seed") = 0, py::arg("spec") = py::none());

  m.def(
      "gradcheck",
      [](std::uint64_t seed, std::size_t volumes) {
        GradcheckOptions o;
        o.seed = seed;
        o.volumes = volumes;
        py::dict out;
        for (const auto& t : run_gradcheck(o)) out[py::str(t.term)] = py::make_tuple(t.max_rel_error, t.passed);
        return out;
      },
      py::arg("seed") = 0, py::arg("volumes") = 20);

  m.def(
      "read_volume",
      [](const std::string& path) {
        const Volume v = io::read_volume(path);
        return py::make_tuple(from_volume(v), v.grid().spacing);
      },
      py::arg("path"));
  m.def(
      "write_volume", [](const std::string& path, const F64& a, const Spacing& s) { io::write_volume(path, to_volume(a, s)); },
      py::arg("path"), py::arg("array"), py::arg("spacing") = unit);
  m.def(
      "write_mask", [](const std::string& path, const py::array& a, const Spacing& s) { io::write_mask(path, to_mask(a, s)); },
      py::arg("path"), py::arg("array"), py::arg("spacing") = unit);
}
