#ifndef DUNKL_GEOMETRY_HPP
#define DUNKL_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace dunkl {

inline constexpr double kPi = 3.14159265358979323846;

// Point on S^{d-1}, d in {2, 3}. Third coordinate is 0 for d = 2.
struct Point {
    int dim = 3;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

Point make_point(int dim, double x, double y, double z = 0.0);
Point from_angle(double theta);                 // d = 2
Point from_spherical(double cos_theta, double phi); // d = 3

double dot(const Point& a, const Point& b);
double norm(const Point& a);
Point normalized(const Point& a);
bool is_unit(const Point& a, double tol = 1e-12);
void require_unit(const Point& a, const char* who);

// arccos of the inner product, clamped; throws std::domain_error on
// non-unit input.
double geodesic_distance(const Point& x, const Point& y);

struct Cap {
    Point center;
    double radius = 0.0; // radians, in (0, pi]
};

Cap make_cap(const Point& center, double radius);

struct SeparatedSet {
    int dim = 2;
    std::vector<Point> points;
    double separation = 0.0;      // requested minimum pairwise distance
    double min_pairwise = 0.0;    // verified minimum pairwise distance
    double covering_radius = 0.0; // measured on the certification stream
    std::uint64_t seed = 0;
};

// Greedy insertion from a seeded low-discrepancy stream, then maximality
// repair against a finer certification stream. The returned set satisfies
// min_pairwise >= eps and covering_radius < eps (covering measured on the
// certification stream).
SeparatedSet build_maximal_separated_set(int dim, double eps, std::uint64_t seed);

// Wrap externally supplied points; verifies the separation, measures the
// covering radius, throws std::invalid_argument if separation fails.
SeparatedSet separated_set_from_points(int dim, std::vector<Point> pts, double eps,
                                       std::uint64_t seed = 0);

// Restricted variant used by the lower-bound bump construction: candidates
// failing `allowed` are skipped and maximality is only enforced relative to
// the allowed region.
SeparatedSet build_separated_set_in_region(int dim, double eps, std::uint64_t seed,
                                           const std::function<bool(const Point&)>& allowed);

// Verification helpers (exact predicates over the stored points).
double min_pairwise_distance(const std::vector<Point>& pts);
double covering_radius_against(const std::vector<Point>& pts, const std::vector<Point>& probes);

struct IntegralResult {
    double value = 0.0;
    double prev_value = 0.0; // value at level - 1
    double est_error = 0.0;  // |value - prev_value|
};

using ScalarField = std::function<double(const Point&)>;

// Reference integral of f * weight over S^{d-1} against the normalized
// rotation-invariant measure. `split_angles` (d = 2) and `split_phi` /
// `split_t` (d = 3) mark zero sets of the weight; panels are graded there.
IntegralResult reference_integrate(const ScalarField& f, const ScalarField& weight, int dim,
                                   int level, const std::vector<double>& split_angles_d2 = {},
                                   const std::vector<double>& split_t_d3 = {},
                                   const std::vector<double>& split_phi_d3 = {});

} // namespace dunkl

#endif
