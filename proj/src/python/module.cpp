#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alloylab/common_density.hpp"
#include "alloylab/hamiltonian.hpp"
#include "alloylab/msa.hpp"
#include "alloylab/runner.hpp"
#include "alloylab/spectral.hpp"
#include "alloylab/toeplitz.hpp"
#include "alloylab/wegner.hpp"

namespace py = pybind11;
using namespace alloylab;

namespace {

ConvolutionVector make_alpha(int dim, const std::vector<std::vector<int>>& offsets,
                             const std::vector<double>& coeffs) {
  std::vector<LatticePoint> pts;
  for (const auto& o : offsets)
    pts.push_back(lattice_point(o.at(0), dim == 2 ? o.at(1) : 0));
  return ConvolutionVector(dim, pts, coeffs);
}

ModelSpec make_model(const std::vector<double>& alpha_coeffs, int mesh,
                     const std::string& density) {
  return ModelSpec::standard_1d(alpha_coeffs, mesh, density);
}

}  // namespace

PYBIND11_MODULE(_alloylab, m) {
  m.doc() = "Alloy type random Schroedinger operator laboratory";
  m.attr("__version__") = kToolVersion;

  py::register_exception<SingularTransform>(m, "SingularTransform");
  py::register_exception<NotAdmissible>(m, "NotAdmissible");
  py::register_exception<IndexMismatch>(m, "IndexMismatch");
  py::register_exception<QuadratureFailure>(m, "QuadratureFailure");
  py::register_exception<NotDifferentiable>(m, "NotDifferentiable");
  py::register_exception<EnergyResonant>(m, "EnergyResonant");

  py::class_<ConvolutionVector>(m, "ConvolutionVector")
      .def(py::init(&make_alpha), py::arg("dim"), py::arg("offsets"), py::arg("coeffs"))
      .def_static("one_d", &ConvolutionVector::one_d, py::arg("coeffs_from_zero"))
      .def_property_readonly("dim", &ConvolutionVector::dim)
      .def_property_readonly("alpha0", &ConvolutionVector::alpha0)
      .def("alpha_star", &ConvolutionVector::alpha_star)
      .def("admissible", &ConvolutionVector::admissible);

  py::class_<IndexBox>(m, "IndexBox")
      .def(py::init<int, int, const ConvolutionVector&>(), py::arg("dim"), py::arg("side"),
           py::arg("alpha"))
      .def_property_readonly("size", &IndexBox::plus_size)
      .def("plus_set",
           [](const IndexBox& b) {
             std::vector<std::pair<int, int>> out;
             for (const auto& p : b.plus_set()) out.emplace_back(p[0], p[1]);
             return out;
           })
      .def("index_of", [](const IndexBox& b, int x, int y) {
        return b.index_of(lattice_point(x, y));
      }, py::arg("x"), py::arg("y") = 0);

  py::class_<NormBoundReport>(m, "NormBoundReport")
      .def_readonly("bound", &NormBoundReport::bound)
      .def_readonly("actual", &NormBoundReport::actual)
      .def_readonly("holds", &NormBoundReport::holds);

  py::class_<ToeplitzTransform>(m, "ToeplitzTransform")
      .def_property_readonly("a", [](const ToeplitzTransform& t) { return t.a; })
      .def_property_readonly("b", [](const ToeplitzTransform& t) { return t.b; })
      .def_readonly("det_a", &ToeplitzTransform::det_a)
      .def_readonly("row_sum_norm_b", &ToeplitzTransform::row_sum_norm_b)
      .def("forward", [](const ToeplitzTransform& t, const Eigen::VectorXd& omega) {
        return forward_coordinates(t, omega);
      })
      .def("inverse", [](const ToeplitzTransform& t, const Eigen::VectorXd& eta) {
        return inverse_coordinates(t, eta);
      })
      .def("verify_norm_bound",
           [](const ToeplitzTransform& t) { return verify_norm_bound(t, t.alpha); });

  m.def("build_transform", &build_transform, py::arg("alpha"), py::arg("box"));
  m.def("row_sum_norm", &row_sum_norm, py::arg("matrix"));

  py::class_<DensityModel>(m, "DensityModel")
      .def_static("by_id", &DensityModel::by_id, py::arg("id"))
      .def_property_readonly("id", &DensityModel::id)
      .def("pdf", &DensityModel::pdf)
      .def_property_readonly("norm_inf", &DensityModel::norm_inf)
      .def("fprime_l1", &DensityModel::fprime_l1)
      .def_property_readonly("mean", &DensityModel::mean)
      .def_property_readonly("variance", &DensityModel::variance)
      .def("sample", [](const DensityModel& d, int n, std::uint64_t seed) {
        Rng rng(seed);
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i) out[i] = d.sample(rng);
        return out;
      }, py::arg("n"), py::arg("seed"));

  py::class_<ConditionalDensityReport>(m, "ConditionalDensityReport")
      .def_readonly("k_value", &ConditionalDensityReport::k_value)
      .def_readonly("marginal_g", &ConditionalDensityReport::marginal_g)
      .def_readonly("rho", &ConditionalDensityReport::rho)
      .def_readonly("quadrature_error", &ConditionalDensityReport::quadrature_error)
      .def_readonly("defined", &ConditionalDensityReport::defined);

  py::class_<CommonDensity>(m, "CommonDensity")
      .def(py::init<ToeplitzTransform, DensityModel>(), py::arg("transform"), py::arg("base"))
      .def("eval", &CommonDensity::eval, py::arg("eta"))
      .def_property_readonly("size", &CommonDensity::size)
      .def("sup_value", &CommonDensity::sup_value)
      .def("marginal", [](const CommonDensity& cd, int j, const Eigen::VectorXd& eta) {
        return marginal_density(cd, j, eta).value;
      }, py::arg("j"), py::arg("eta"))
      .def("conditional", &conditional_density, py::arg("j"), py::arg("eta"))
      .def("grad_integral", [](const CommonDensity& cd, int j) {
        return grad_density_integral(cd, j).value;
      }, py::arg("j"))
      .def("integrate_total", [](const CommonDensity& cd) { return integrate_total(cd).value; });

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_model), py::arg("alpha_coeffs"), py::arg("mesh") = 8,
           py::arg("density") = "triangular")
      .def_readonly("dim", &ModelSpec::dim)
      .def_readonly("mesh", &ModelSpec::mesh);

  py::class_<DiscreteHamiltonian>(m, "DiscreteHamiltonian")
      .def_property_readonly("n", [](const DiscreteHamiltonian& h) { return h.matrix.rows(); })
      .def_property_readonly("potential",
                             [](const DiscreteHamiltonian& h) { return h.potential; })
      .def("dense", [](const DiscreteHamiltonian& h) { return Eigen::MatrixXd(h.matrix); })
      .def("eigenvalues",
           [](const DiscreteHamiltonian& h) { return eigenvalues(h).eigenvalues; })
      .def("good_box_norm", [](const DiscreteHamiltonian& h, double energy) {
        return good_box_norm(h, energy);
      }, py::arg("energy"));

  m.def("assemble_from_seed", &assemble_from_seed, py::arg("model"), py::arg("side"),
        py::arg("seed"));
  m.def("sample_field",
        [](const DensityModel& d, const IndexBox& box, std::uint64_t seed) {
          return sample_field(d, box, seed).values;
        },
        py::arg("density"), py::arg("box"), py::arg("seed"));
  m.def("free_laplacian_spectrum_1d",
        [](int side, int mesh) { return free_laplacian_spectrum_1d(GridSpec(1, side, mesh)); },
        py::arg("side"), py::arg("mesh"));

  m.def("counting", [](const Eigen::VectorXd& sorted_eigenvalues, double energy, int side,
                       int dim) {
    SpectralSummary s{sorted_eigenvalues, GridSpec(dim, side, 1), 0};
    return counting(s, energy);
  }, py::arg("sorted_eigenvalues"), py::arg("energy"), py::arg("side"), py::arg("dim") = 1);
  m.def("trace_projection", [](const Eigen::VectorXd& sorted_eigenvalues, double e1, double e2) {
    SpectralSummary s{sorted_eigenvalues, GridSpec(1, 1, 1), 0};
    return trace_projection(s, e1, e2);
  }, py::arg("sorted_eigenvalues"), py::arg("e1"), py::arg("e2"));

  m.def("expected_trace",
        [](const ModelSpec& model, double energy, double eps, int side, int samples,
           std::uint64_t seed) {
          const auto stats = expected_trace(model, energy, eps, side, samples, seed);
          return py::make_tuple(stats.mean, stats.half_width);
        },
        py::arg("model"), py::arg("energy"), py::arg("eps"), py::arg("side"),
        py::arg("samples"), py::arg("seed"));

  m.def("resolvent_identity_residual", [](const ModelSpec& model, int big_side, int sub_side,
                                          double re_z, double im_z, std::uint64_t seed) {
    ResolventIdentityInstance inst;
    inst.model = model;
    inst.big_side = big_side;
    inst.sub_side = sub_side;
    inst.z = {re_z, im_z};
    inst.field_seed = seed;
    inst.probe_seed = seed + 1;
    return resolvent_identity_residual(inst);
  }, py::arg("model"), py::arg("big_side"), py::arg("sub_side"), py::arg("re_z"),
     py::arg("im_z"), py::arg("seed"));
}
