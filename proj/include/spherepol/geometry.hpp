#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace spherepol {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  bool operator==(const Vec3&) const = default;
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sphere {
  Vec3 center;
  double radius = 1.0;
  double kappa = 1.0;
  // total free charge; the surface density is charge / (4 pi r^2)
  double charge = 0.0;

  double free_density() const;
};

struct Configuration {
  std::vector<Sphere> spheres;
  double kappa0 = 1.0;

  std::size_t size() const { return spheres.size(); }
};

enum class SignCase { AllGreater, AllLess, Mixed };

const char* to_string(SignCase s);

struct AssumptionReport {
  double min_radius = 0, max_radius = 0;
  // +inf for a single sphere
  double min_separation = 0;
  double min_kappa = 0, max_kappa = 0;
  SignCase sign_uniform = SignCase::AllGreater;
};

struct Species {
  double radius = 1.0;
  double kappa = 10.0;
  double charge = 1.0;
};

// Alternating: species and charge sign follow the parity of i+j+k.
// Striped: they follow the parity of the layer index k.
enum class Pattern { Alternating, Striped };

const char* to_string(Pattern p);
Pattern pattern_from_string(const std::string& s);

// Lattice points (i,j,k)*edge, ordered with i fastest. With one species the
// charge sign flips between the two parity classes; with several species the
// parity class selects the species.
Configuration build_lattice(int nx, int ny, int nz, double edge,
                            const std::vector<Species>& species, Pattern pattern,
                            double kappa0 = 1.0);

// Throws GeometryError for invalid spheres or overlapping pairs.
AssumptionReport validate(const Configuration& config);

double min_separation(const Configuration& config);
SignCase sign_case(const Configuration& config);

}  // namespace spherepol
