#include <gtest/gtest.h>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "poolbench/special.hpp"

using namespace poolbench::special;

// Reference values below were computed with scipy.stats (nct, studentized_range).

TEST(NoncentralT, ReducesToCentralT) {
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    for (double df : {1.0, 4.0, 30.0}) EXPECT_NEAR(noncentral_t_cdf(x, df, 0.0), t_cdf(x, df), 1e-12);
  }
}

TEST(NoncentralT, AtZeroIsNormalTail) {
  for (double ncp : {-2.0, 0.3, 1.0, 5.0}) EXPECT_NEAR(noncentral_t_cdf(0.0, 9.0, ncp), normal_cdf(-ncp), 1e-14);
}

TEST(NoncentralT, ReflectionSymmetry) {
  for (double x : {-2.0, 0.5, 3.0}) {
    for (double ncp : {-1.5, 0.8, 4.0}) {
      EXPECT_NEAR(noncentral_t_cdf(x, 12.0, ncp), 1.0 - noncentral_t_cdf(-x, 12.0, -ncp), 1e-12);
    }
  }
}

TEST(NoncentralT, ScipyReferenceValues) {
  EXPECT_NEAR(noncentral_t_cdf(1.5, 10, 2.0), 0.3047854473760421, 1e-9);
  EXPECT_NEAR(noncentral_t_cdf(-1.0, 7, 1.3), 0.014117368737643562, 1e-9);
  EXPECT_NEAR(noncentral_t_cdf(30, 50, 25), 0.9403675545636577, 1e-8);
  EXPECT_NEAR(noncentral_t_cdf(2.0, 3, -1), 0.9900314993672691, 1e-9);
}

TEST(NoncentralT, AgreesWithBoostOverAGrid) {
  for (double df : {1.0, 2.5, 10.0, 43.0, 159.0, 1097.0}) {
    for (double ncp : {-6.0, -1.0, 0.5, 2.0, 4.2, 10.0, 31.0}) {
      boost::math::non_central_t_distribution<double> d(df, ncp);
      for (double x : {-5.0, -1.96, 0.0, 1.0, 1.98, 4.0, 12.0, 35.0}) {
        EXPECT_NEAR(noncentral_t_cdf(x, df, ncp), boost::math::cdf(d, x), 1e-9)
            << "x=" << x << " df=" << df << " ncp=" << ncp;
      }
    }
  }
}

TEST(NoncentralT, RejectsBadParameters) {
  EXPECT_THROW(noncentral_t_cdf(1.0, 0.0, 1.0), poolbench::StatsError);
  EXPECT_THROW(noncentral_t_cdf(1.0, 5.0, std::numeric_limits<double>::infinity()), poolbench::StatsError);
}

TEST(StudentizedRange, ZeroIsZero) {
  EXPECT_EQ(studentized_range_cdf(0.0, 3, 10), 0.0);
  EXPECT_EQ(studentized_range_sf(0.0, 8, 217), 1.0);
}

TEST(StudentizedRange, KTwoMatchesCentralT) {
  for (double df : {2.0, 5.0, 25.0, 200.0}) {
    for (double q : {0.3, 1.0, 2.0, 3.5, 6.0}) {
      const double expected = 2.0 * boost::math::cdf(boost::math::complement(
                                        boost::math::students_t_distribution<double>(df), q / std::sqrt(2.0)));
      EXPECT_NEAR(studentized_range_sf(q, 2, df), expected, 1e-7) << "q=" << q << " df=" << df;
    }
  }
}

TEST(StudentizedRange, PublishedCriticalValue) {
  EXPECT_NEAR(studentized_range_cdf(3.523, 3, 25), 0.95, 2e-4);
}

TEST(StudentizedRange, ScipyReferenceValues) {
  EXPECT_NEAR(studentized_range_sf(3.523, 3, 25), 0.049967419978968364, 1e-6);
  EXPECT_NEAR(studentized_range_sf(6.786, 8, 217), 8.016838441260443e-05, 1e-7);
  EXPECT_NEAR(studentized_range_sf(3.301, 3, 25), 0.06930873159498974, 1e-6);
  EXPECT_NEAR(studentized_range_sf(4.0, 10, 10), 0.24263930573542347, 1e-6);
  EXPECT_NEAR(studentized_range_sf(1.0, 5, 3), 0.9417805887035691, 1e-6);
  EXPECT_NEAR(studentized_range_sf(5.0, 20, 1000), 0.052965240451883555, 1e-6);
}

TEST(StudentizedRange, MonotoneInQ) {
  double prev = 1.0;
  for (double q = 0.25; q < 10.0; q += 0.25) {
    const double sf = studentized_range_sf(q, 6, 40);
    EXPECT_LE(sf, prev + 1e-12);
    prev = sf;
  }
}

TEST(StudentizedRange, InfiniteDfLimit) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(studentized_range_sf(3.0, 4, inf), studentized_range_sf(3.0, 4, 1e6), 1e-5);
  EXPECT_NEAR(studentized_range_sf(2.0, 2, inf), 2.0 * (1.0 - normal_cdf(2.0 / std::sqrt(2.0))), 1e-9);
}

TEST(StudentizedRange, RejectsBadParameters) {
  EXPECT_THROW(studentized_range_sf(1.0, 1, 10), poolbench::StatsError);
  EXPECT_THROW(studentized_range_sf(1.0, 3, 0.5), poolbench::StatsError);
}
