#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "scapegeom/conditioning.hpp"
#include "scapegeom/consistency.hpp"
#include "scapegeom/depth_codec.hpp"
#include "scapegeom/diffusion.hpp"
#include "scapegeom/keyframe_pipeline.hpp"
#include "scapegeom/projection.hpp"

namespace py = pybind11;
using namespace scapegeom;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

void expect_shape(const py::buffer_info& b, std::initializer_list<py::ssize_t> shape, const char* what) {
  bool ok = b.ndim == static_cast<py::ssize_t>(shape.size());
  size_t i = 0;
  for (py::ssize_t s : shape) {
    if (ok && s >= 0 && b.shape[i] != s) ok = false;
    ++i;
  }
  if (!ok) throw Error(ErrorKind::kDimensionMismatch, std::string(what) + " has the wrong shape");
}

std::vector<double> to_vector(const DArray& a) { return {a.data(), a.data() + a.size()}; }

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(T));
  return out;
}

RgbdImage image_from(const DArray& rgb, const DArray& depth) {
  const auto rb = rgb.request(), db = depth.request();
  expect_shape(rb, {-1, -1, 3}, "rgb");
  expect_shape(db, {rb.shape[0], rb.shape[1]}, "depth");
  RgbdImage img(static_cast<int>(rb.shape[1]), static_cast<int>(rb.shape[0]));
  img.rgb = to_vector(rgb);
  img.depth = to_vector(depth);
  return img;
}

VisibilityMask mask_from(const U8Array& mask) {
  const auto b = mask.request();
  expect_shape(b, {-1, -1}, "mask");
  VisibilityMask m(static_cast<int>(b.shape[1]), static_cast<int>(b.shape[0]));
  for (size_t i = 0; i < m.mask.size(); ++i) m.mask[i] = mask.data()[i] ? 1 : 0;
  return m;
}

// H×W×4 array -> flat interleaved buffer, with its mask checked against H×W.
std::vector<double> rgbd_from(const DArray& a, const VisibilityMask& m, const char* what) {
  expect_shape(a.request(), {m.height, m.width, 4}, what);
  return to_vector(a);
}

PointCloud cloud_from(const DArray& positions, const DArray& colors) {
  const auto pb = positions.request();
  expect_shape(pb, {-1, 3}, "positions");
  expect_shape(colors.request(), {pb.shape[0], 3}, "colors");
  PointCloud c;
  const double* p = positions.data();
  const double* q = colors.data();
  for (py::ssize_t i = 0; i < pb.shape[0]; ++i)
    c.push_back(Vec3(p[3 * i], p[3 * i + 1], p[3 * i + 2]), Vec3(q[3 * i], q[3 * i + 1], q[3 * i + 2]), 0);
  return c;
}

py::array_t<double> vec3s(const std::vector<Vec3>& v) {
  py::array_t<double> out({static_cast<py::ssize_t>(v.size()), py::ssize_t(3)});
  double* w = out.mutable_data();
  for (const auto& x : v) {
    *w++ = x.x();
    *w++ = x.y();
    *w++ = x.z();
  }
  return out;
}

py::array_t<double> color_image(const conditioning::ColorImage& img) {
  return to_array(img.rgb, {img.height, img.width, 3});
}

diffusion::ReverseVariance parse_variance(const std::string& s) {
  if (s == "posterior") return diffusion::ReverseVariance::kPosterior;
  if (s == "forward") return diffusion::ReverseVariance::kForward;
  throw Error(ErrorKind::kOutOfRangeValue, "variance must be 'posterior' or 'forward'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometry, consistency and sampling kernels for RGB-D scene generation";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<CameraIntrinsics>(m, "Intrinsics")
      .def(py::init([](double fx, double fy, double cx, double cy, int width, int height) {
             CameraIntrinsics k{fx, fy, cx, cy, width, height};
             validate(k).throw_if_error();
             return k;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"), py::arg("height"))
      .def_readonly("fx", &CameraIntrinsics::fx)
      .def_readonly("fy", &CameraIntrinsics::fy)
      .def_readonly("cx", &CameraIntrinsics::cx)
      .def_readonly("cy", &CameraIntrinsics::cy)
      .def_readonly("width", &CameraIntrinsics::width)
      .def_readonly("height", &CameraIntrinsics::height);

  py::class_<Pose>(m, "Pose")
      .def(py::init([](const Mat3& r, const Vec3& t) {
             Pose p{r, t};
             validate(p).throw_if_error();
             return p;
           }),
           py::arg("rotation") = Mat3(Mat3::Identity()), py::arg("translation") = Vec3(Vec3::Zero()))
      .def_readonly("rotation", &Pose::rotation)
      .def_readonly("translation", &Pose::translation)
      .def("inverse", &Pose::inverse)
      .def("compose", &Pose::compose);

  py::class_<Camera>(m, "Camera")
      .def(py::init([](const CameraIntrinsics& k, const Pose& p) { return Camera{k, p}; }), py::arg("intrinsics"),
           py::arg("pose") = Pose::Identity())
      .def_readonly("intrinsics", &Camera::intrinsics)
      .def_readonly("pose", &Camera::pose);

  m.def("yaw_rotation", &yaw_rotation, py::arg("radians"));

  m.def(
      "back_project",
      [](const DArray& rgb, const DArray& depth, const Camera& camera) {
        const PointCloud c = projection::back_project(image_from(rgb, depth), camera);
        return py::make_tuple(vec3s(c.positions), vec3s(c.colors));
      },
      py::arg("rgb"), py::arg("depth"), py::arg("camera"),
      "Back-projects every pixel with depth > 0. Returns (positions Nx3, colors Nx3) in row-major pixel order.");

  m.def(
      "render_points",
      [](const DArray& positions, const DArray& colors, const Camera& camera, int splat_radius) {
        const PointCloud c = cloud_from(positions, colors);
        projection::RenderOptions opts;
        opts.splat_radius = splat_radius;
        const RenderBundle b = projection::render_points(c, camera, opts);
        const int h = b.image.height, w = b.image.width;
        return py::make_tuple(to_array(b.image.rgb, {h, w, 3}), to_array(b.image.depth, {h, w}),
                              to_array(b.mask.mask, {h, w}));
      },
      py::arg("positions"), py::arg("colors"), py::arg("camera"), py::arg("splat_radius") = 0,
      "Z-buffered splatting. Returns (rgb HxWx3, depth HxW, mask HxW uint8).");

  m.def(
      "warp_loss",
      [](const DArray& x, const DArray& h, const U8Array& mask, double trim, double depth_weight) {
        const VisibilityMask vm = mask_from(mask);
        const auto r = consistency::warp_loss_detailed(rgbd_from(x, vm, "x"), rgbd_from(h, vm, "h"), vm,
                                                       {trim, depth_weight});
        py::dict out;
        out["loss"] = r.loss;
        out["kept_pixels"] = r.kept_pixels;
        out["trimmed_pixels"] = r.trimmed_pixels;
        return out;
      },
      py::arg("x"), py::arg("h"), py::arg("mask"), py::arg("trim") = 0.05, py::arg("depth_weight") = 1.0,
      "Trimmed masked MSE between normalized HxWx4 RGB-D arrays.");

  m.def(
      "warp_loss_gradient",
      [](const DArray& x, const DArray& h, const U8Array& mask, double trim, double depth_weight) {
        const VisibilityMask vm = mask_from(mask);
        const auto g = consistency::warp_loss_gradient(rgbd_from(x, vm, "x"), rgbd_from(h, vm, "h"), vm,
                                                       {trim, depth_weight});
        return to_array(g, {vm.height, vm.width, 4});
      },
      py::arg("x"), py::arg("h"), py::arg("mask"), py::arg("trim") = 0.05, py::arg("depth_weight") = 1.0);

  m.def(
      "filter_dataset",
      [](const std::vector<double>& losses, double drop) { return consistency::filter_dataset(losses, drop); },
      py::arg("losses"), py::arg("drop") = 0.2, "Indices kept after dropping the highest-loss fraction.");

  m.def(
      "select_keyframes",
      [](const CameraIntrinsics& k, const std::vector<Pose>& poses, double beta, double gamma) {
        return pipeline::select_keyframes(Trajectory{k, poses}, {beta, gamma});
      },
      py::arg("intrinsics"), py::arg("poses"), py::arg("beta") = 10.0, py::arg("gamma") = 20.0);

  m.def(
      "encode_depth16",
      [](const DArray& meters, double max_depth) {
        const auto b = meters.request();
        const auto codes = depth::encode_depth16(to_vector(meters), {max_depth});
        return to_array(codes, b.shape);
      },
      py::arg("meters"), py::arg("max_depth") = kDefaultMaxDepth);

  m.def(
      "decode_depth16",
      [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& codes, double max_depth) {
        const auto b = codes.request();
        const std::vector<std::uint16_t> v(codes.data(), codes.data() + codes.size());
        return to_array(depth::decode_depth16(v, {max_depth}), b.shape);
      },
      py::arg("codes"), py::arg("max_depth") = kDefaultMaxDepth);

  m.def(
      "sample_gaussian",
      [](double mu, double sigma, int steps, std::uint64_t seed, size_t count, size_t dim, const std::string& variance) {
        const auto schedule = diffusion::NoiseSchedule::default_linear(steps);
        const auto denoiser = diffusion::analytic_gaussian_denoiser(mu, sigma);
        std::vector<diffusion::Sample> xs;
        {
          py::gil_scoped_release release;
          xs = diffusion::sample_batch(*denoiser, schedule, dim, nullptr, nullptr, seed, count,
                                       {parse_variance(variance)});
        }
        py::array_t<double> out({static_cast<py::ssize_t>(count), static_cast<py::ssize_t>(dim)});
        double* w = out.mutable_data();
        for (const auto& x : xs) w = std::copy(x.begin(), x.end(), w);
        return out;
      },
      py::arg("mu"), py::arg("sigma"), py::arg("steps"), py::arg("seed"), py::arg("count") = 1000,
      py::arg("dim") = 1, py::arg("variance") = "posterior",
      "Seeded ancestral sampling with the exact score of N(mu, sigma^2) data. Returns count x dim.");

  m.def(
      "rasterize_boxes",
      [](const std::vector<std::tuple<Vec3, Vec3, double, std::string>>& boxes, const Camera& camera) {
        std::vector<conditioning::ObjectBox> bs;
        for (const auto& [center, size, yaw, category] : boxes) {
          conditioning::ObjectBox b{center, size, yaw, conditioning::parse_category(category)};
          conditioning::validate(b).throw_if_error();
          bs.push_back(b);
        }
        return py::make_tuple(color_image(conditioning::rasterize_boxes_semantic(bs, camera)),
                              color_image(conditioning::rasterize_boxes_orientation(bs, camera)));
      },
      py::arg("boxes"), py::arg("camera"),
      "boxes: (center, size, yaw, category) tuples. Returns (semantic, orientation) HxWx3 images.");

  m.def(
      "downsample_mask",
      [](const U8Array& mask, int factor) {
        const VisibilityMask d = conditioning::downsample_mask(mask_from(mask), factor);
        return to_array(d.mask, {d.height, d.width});
      },
      py::arg("mask"), py::arg("factor") = 8);
}
