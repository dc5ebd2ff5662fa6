#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mqcsim/geometry.hpp"
#include "mqcsim/hilbert.hpp"
#include "mqcsim/mqc.hpp"

namespace mqcsim::oracle {

// Brute-force references for the test suite. Nothing here calls the sector,
// evolution or spectrum code, and the matrix algebra is done on a private
// row-major type rather than through Eigen.

inline constexpr int kMaxSpectrumSpins = 8;
inline constexpr int kMaxExponentialSpins = 6;

struct OracleReport {
  std::string quantity;
  std::vector<double> main_values;
  std::vector<double> oracle_values;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static OracleReport compare(std::string quantity, std::vector<double> main_values, std::vector<double> oracle_values,
                              double tolerance);
};

/// One aligned line: quantity, deviation, tolerance, PASS/FAIL.
void print(std::ostream& out, const OracleReport& report);

/// Same contract as spectrum_direct (raw normalization), computed by an
/// explicit double loop that bins each element product by its order.
MqcSpectrum spectrum(const DensityOperator& ref, const DensityOperator& actual);

/// Closed-form evolution of rho0 = Iz / 2 under H0 for two spins coupled by d.
/// On the {|up up>, |down down>} pair H0 = -(d/2) sigma_x, so
/// rho(t) = (sigma_z cos(dt) + sigma_y sin(dt)) / 2 there and zero elsewhere.
struct TwoSpinResult {
  Matrix rho;       // 4 x 4 in the Zeeman basis
  double a0 = 0.0;  // cos^2(dt) / 2
  double a2 = 0.0;  // sin^2(dt) / 4, same for dM = +2 and -2
};
TwoSpinResult two_spin(double d, double t);

/// First maximum of A(+-2) in t: pi / (2 |d|).
double two_spin_first_maximum(double d);

/// exp(-i H t) by scaling and squaring of a Taylor series.
Matrix matrix_exp(const Matrix& h, double t);

/// Pair Hamiltonians assembled from Kronecker products of single-spin
/// Pauli matrices: Hdd from 2 IzIz - (IxIx + IyIy), H0 from -(IxIx - IyIy).
Matrix dipolar_hamiltonian(const CouplingTable& table);
Matrix double_quantum_hamiltonian(const CouplingTable& table);

}  // namespace mqcsim::oracle
