#ifndef GEOSEL_GEODESY_HPP
#define GEOSEL_GEODESY_HPP

#include <cmath>
#include <numbers>

namespace geosel {

// Mean earth radius (IUGG), kilometers.
inline constexpr double kEarthRadiusKm = 6371.0088;

// Half the great circle: the maximum possible great-circle distance.
inline constexpr double kMaxGcdKm = std::numbers::pi * kEarthRadiusKm;

/// Wraps a longitude into [-180, +180). Throws Error(InputFormat) on
/// non-finite input.
double normalize_lon(double lon_deg);

/// A latitude/longitude pair in degrees. Longitude is normalized on
/// construction; at the poles (|lat| == 90) longitude is canonicalized to 0
/// so that all pole representations compare and measure as the same point.
struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, +90]
    double lon = 0.0;  // degrees, [-180, +180)

    GeoPoint() = default;
    GeoPoint(double lat_deg, double lon_deg);
};

/// A great-circle distance in kilometers. Value is in [0, pi * R_earth].
struct DistanceKm {
    double km = 0.0;

    DistanceKm() = default;
    explicit constexpr DistanceKm(double v) : km(v) {}
};

/// Great-circle distance between two points via the haversine formula.
/// Symmetric bit-for-bit in its arguments; zero iff the points are equal
/// after normalization.
DistanceKm gcd(const GeoPoint& a, const GeoPoint& b);

inline double gcd_km(const GeoPoint& a, const GeoPoint& b) {
    return gcd(a, b).km;
}

}  // namespace geosel

#endif
