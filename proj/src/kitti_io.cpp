#include "dapc/kitti_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "dapc/error.hpp"

namespace dapc {
namespace {

constexpr double kOrthonormalTolerance = 1e-3;

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

float load_le_float(const unsigned char* bytes) {
  std::uint32_t raw;
  std::memcpy(&raw, bytes, sizeof raw);
  if constexpr (std::endian::native == std::endian::big) raw = byteswap32(raw);
  return std::bit_cast<float>(raw);
}

void store_le_float(float value, unsigned char* bytes) {
  std::uint32_t raw = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) raw = byteswap32(raw);
  std::memcpy(bytes, &raw, sizeof raw);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

double parse_number(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::Parse, context + ": bad number '" + token + "'");
  }
  return value;
}

double max_orthonormal_error(const Eigen::Matrix3d& r) {
  return (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::Vector3d Calibration::lidar_to_camera(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d cam =
      Tr_velo_to_cam.leftCols<3>() * p + Tr_velo_to_cam.col(3);
  return R0_rect * cam;
}

Eigen::Vector3d Calibration::camera_to_lidar(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d unrect = R0_rect.transpose() * p;
  return Tr_velo_to_cam.leftCols<3>().transpose() * (unrect - Tr_velo_to_cam.col(3));
}

void validate(const Calibration& calib) {
  if (!calib.P2.allFinite() || !calib.R0_rect.allFinite() ||
      !calib.Tr_velo_to_cam.allFinite()) {
    throw Error(ErrorKind::Validation, "calibration contains non-finite values");
  }
  if (max_orthonormal_error(calib.R0_rect) > kOrthonormalTolerance) {
    throw Error(ErrorKind::Validation, "R0_rect is not orthonormal");
  }
  if (max_orthonormal_error(calib.Tr_velo_to_cam.leftCols<3>()) > kOrthonormalTolerance) {
    throw Error(ErrorKind::Validation, "Tr_velo_to_cam rotation is not orthonormal");
  }
}

Calibration canonical_calibration() {
  Calibration calib;
  calib.Tr_velo_to_cam << 0, -1, 0, 0,  //
      0, 0, -1, 0,                      //
      1, 0, 0, 0;
  calib.R0_rect.setIdentity();
  calib.P2 << 721.5377, 0, 609.5593, 44.85728,  //
      0, 721.5377, 172.854, 0.2163791,          //
      0, 0, 1, 0.002745884;
  return calib;
}

OrientedBox3D camera_box_to_lidar(const CameraBox& cam, const Calibration& calib) {
  // Camera y points down: the centroid sits h/2 above the bottom face.
  const Eigen::Vector3d centroid =
      cam.bottom_center - Eigen::Vector3d(0.0, 0.5 * cam.h, 0.0);
  return make_box(calib.camera_to_lidar(centroid), {cam.l, cam.w, cam.h},
                  -cam.ry - 0.5 * std::numbers::pi);
}

CameraBox lidar_box_to_camera(const OrientedBox3D& box, const Calibration& calib) {
  CameraBox cam;
  cam.h = box.height();
  cam.w = box.width();
  cam.l = box.length();
  cam.bottom_center =
      calib.lidar_to_camera(box.center) + Eigen::Vector3d(0.0, 0.5 * cam.h, 0.0);
  cam.ry = normalize_angle(-box.yaw - 0.5 * std::numbers::pi);
  return cam;
}

PointCloud read_velodyne(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorKind::Malformed, path.string() + ": size " +
                                          std::to_string(bytes.size()) +
                                          " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  cloud.frame_id = path.stem().string();
  const std::size_t n = bytes.size() / 16;
  cloud.points.resize(n);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i) {
    std::array<float, 4> v;
    for (std::size_t k = 0; k < 4; ++k) v[k] = load_le_float(data + 16 * i + 4 * k);
    for (std::size_t k = 0; k < 4; ++k) {
      if (!std::isfinite(v[k])) {
        throw Error(ErrorKind::Parse, path.string() + ": non-finite value at point " +
                                          std::to_string(i) + " component " +
                                          std::to_string(k));
      }
    }
    if (v[3] < 0.0f || v[3] > 1.0f) {
      throw Error(ErrorKind::Parse, path.string() + ": reflectance outside [0,1] at point " +
                                        std::to_string(i));
    }
    cloud.points[i] = {v[0], v[1], v[2], v[3]};
  }
  return cloud;
}

void write_velodyne(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string bytes(cloud.points.size() * 16, '\0');
  auto* data = reinterpret_cast<unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point& p = cloud.points[i];
    const std::array<double, 4> v{p.x, p.y, p.z, p.r};
    for (std::size_t k = 0; k < 4; ++k) {
      store_le_float(static_cast<float>(v[k]), data + 16 * i + 4 * k);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::vector<GroundTruth> parse_labels(const std::string& text, const Calibration& calib) {
  std::vector<GroundTruth> gts;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string where = "label line " + std::to_string(line_no);
    if (tokens.size() != 15) {
      throw Error(ErrorKind::Malformed, where + ": expected 15 columns, got " +
                                            std::to_string(tokens.size()));
    }
    std::array<double, 14> v;
    for (std::size_t k = 0; k < 14; ++k) v[k] = parse_number(tokens[k + 1], where);

    GroundTruth gt;
    gt.class_label = tokens[0];
    gt.truncation = v[0];
    gt.alpha = v[2];
    gt.bbox2d = {v[3], v[4], v[5], v[6]};
    gt.dont_care = gt.class_label == "DontCare";
    if (gt.dont_care) {
      gt.occlusion = static_cast<int>(v[1]);
      gts.push_back(std::move(gt));
      continue;
    }
    if (v[1] != std::floor(v[1]) || v[1] < 0 || v[1] > 3) {
      throw Error(ErrorKind::Parse, where + ": occlusion must be 0..3");
    }
    gt.occlusion = static_cast<int>(v[1]);
    if (gt.truncation < 0.0 || gt.truncation > 1.0) {
      throw Error(ErrorKind::Parse, where + ": truncation outside [0,1]");
    }
    if (!(gt.bbox2d.right > gt.bbox2d.left && gt.bbox2d.bottom > gt.bbox2d.top)) {
      throw Error(ErrorKind::Parse, where + ": degenerate 2D box");
    }
    CameraBox cam{{v[10], v[11], v[12]}, v[7], v[8], v[9], v[13]};
    try {
      gt.box = camera_box_to_lidar(cam, calib);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where + ": " + e.what());
    }
    gts.push_back(std::move(gt));
  }
  return gts;
}

std::vector<GroundTruth> read_labels(const std::filesystem::path& path,
                                     const Calibration& calib) {
  try {
    return parse_labels(slurp(path), calib);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_labels(const std::filesystem::path& path, const std::vector<GroundTruth>& gts,
                  const Calibration& calib) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (const GroundTruth& gt : gts) {
    out << gt.class_label << ' ' << gt.truncation << ' ' << gt.occlusion << ' ' << gt.alpha
        << ' ' << gt.bbox2d.left << ' ' << gt.bbox2d.top << ' ' << gt.bbox2d.right << ' '
        << gt.bbox2d.bottom << ' ';
    if (gt.box) {
      const CameraBox cam = lidar_box_to_camera(*gt.box, calib);
      out << cam.h << ' ' << cam.w << ' ' << cam.l << ' ' << cam.bottom_center.x() << ' '
          << cam.bottom_center.y() << ' ' << cam.bottom_center.z() << ' ' << cam.ry;
    } else {
      out << "-1 -1 -1 -1000 -1000 -1000 -10";
    }
    out << '\n';
  }
}

Calibration parse_calibration(const std::string& text) {
  std::map<std::string, std::vector<double>> entries;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::vector<double> values;
    for (const auto& t : split_ws(line.substr(colon + 1))) {
      values.push_back(parse_number(t, "calibration line " + std::to_string(line_no)));
    }
    entries[key] = std::move(values);
  }
  auto fetch = [&](const std::string& key, std::size_t count) {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      throw Error(ErrorKind::MissingField, "calibration is missing " + key);
    }
    if (it->second.size() != count) {
      throw Error(ErrorKind::Malformed, key + ": expected " + std::to_string(count) +
                                            " values, got " +
                                            std::to_string(it->second.size()));
    }
    return it->second;
  };
  const auto p2 = fetch("P2", 12);
  const auto r0 = fetch("R0_rect", 9);
  const auto tr = fetch("Tr_velo_to_cam", 12);

  Calibration calib;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      calib.P2(r, c) = p2[4 * r + c];
      calib.Tr_velo_to_cam(r, c) = tr[4 * r + c];
    }
    for (int c = 0; c < 3; ++c) calib.R0_rect(r, c) = r0[3 * r + c];
  }
  validate(calib);
  return calib;
}

Calibration read_calibration(const std::filesystem::path& path) {
  try {
    return parse_calibration(slurp(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_calibration(const std::filesystem::path& path, const Calibration& calib) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  auto row_major = [&](const std::string& key, const auto& m) {
    out << key << ':';
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) out << ' ' << m(r, c);
    }
    out << '\n';
  };
  row_major("P2", calib.P2);
  row_major("R0_rect", calib.R0_rect);
  row_major("Tr_velo_to_cam", calib.Tr_velo_to_cam);
}

}  // namespace dapc
