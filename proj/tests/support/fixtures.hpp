#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string source_dir() { return MIXPPL_SOURCE_DIR; }
inline std::string model_path(const std::string& name) {
  return source_dir() + "/models/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Alternate spellings of the bundled models: capitalized Type,
// parenthesized guards, `=` equality queries, the TruncatedGaussian
// and mixed aliases, tighter layout.
inline const char* kGpaVariant = R"(
Type Applicant, Country;
distinct Country NewZealand, India, USA;
#Applicant(Nationality = c) ~
 if (c==USA) then Poisson(50)
 else Poisson(5);
origin Country Nationality(Applicant);
random Real GPA(Applicant s) ~
 if Nationality(s) == USA then
     Mix({ TruncatedGauss(3, 1, 0, 4) -> 0.9998,
         4 -> 0.0001, 0 -> 0.0001})
else Mix({ TruncatedGauss(5, 4, 0, 10) -> 0.989,
          10 -> 0.009, 0 -> 0.002});
random Applicant David ~
    UniformChoice({a for Applicant a});
obs GPA(David) = 4;
query Nationality(David) = USA;
)";

inline const char* kScaleVariant = R"(
fixed Real sigma = 1.0; // stddev of observation
random Real FakeCoinDiff ~
 TruncatedGaussian(0.5, 1, 0.1, 1);
random Bool hasFakeCoin ~ BooleanDistrib(0.5);
random Real obsDiff ~ if hasFakeCoin
  then Gaussian(FakeCoinDiff, sigma*sigma)
  else Mix({ 0 -> 1.0 });
obs obsDiff = 0;
query hasFakeCoin;
)";

// The aircraft model in its terse spelling, with one concrete observation.
inline const char* kAircraftVariant = R"(
type t_radar; distinct t_radar R[6];
// model aircraft movement
random Real X(Timestep t) ~ if t == @0
  then Gaussian(2, 1) else Gaussian(X(prev(t)), 4);
random Real Y(Timestep t) ~ if t == @0
  then Gaussian(-1, 1) else Gaussian(Y(prev(t)), 4);
// observation model of radars
random Real obs_dist(Timestep t, t_radar r) ~
  if dist(X(t),Y(t),r) > radius(r) then
    mixed({radius(r)->0.999,
      TruncatedGauss(radius(r),0.01,0,radius(r))->0.001})
  else
    TruncatedGauss(dist(X(t),Y(t),r),0.01,0,radius(r));
fixed Real loc_x(t_radar r) = { R[0] -> 6.0, R[1] -> 3.0, R[2] -> -3.0,
                                R[3] -> -6.0, R[4] -> -3.0, R[5] -> 3.0 };
fixed Real loc_y(t_radar r) = { R[0] -> 0.0, R[1] -> 5.0, R[2] -> 5.0,
                                R[3] -> 0.0, R[4] -> -5.0, R[5] -> -5.0 };
fixed Real radius(t_radar r) = { R[0] -> 5.0, R[1] -> 5.0, R[2] -> 5.0,
                                 R[3] -> 5.0, R[4] -> 5.0, R[5] -> 5.0 };
// observation and query
obs obs_dist(@0, R[0]) = 4.2;
query X(t) for Timestep t;
query Y(t) for Timestep t;
)";

}  // namespace fixtures
