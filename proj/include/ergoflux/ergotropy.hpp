#pragma once

#include "ergoflux/channels.hpp"
#include "ergoflux/state.hpp"

namespace ergoflux {

struct ErgotropyBreakdown {
    double total = 0.0;
    double incoherent = 0.0; // ergotropy of the energy-dephased state
    double coherent = 0.0;   // the rest
};

double ergotropy(const DensityMatrix& rho, const BatteryHamiltonian& h);
DensityMatrix passive_state(const DensityMatrix& rho, const BatteryHamiltonian& h);
DensityMatrix dephase(const DensityMatrix& rho, const BatteryHamiltonian& h);
ErgotropyBreakdown ergotropy_breakdown(const DensityMatrix& rho, const BatteryHamiltonian& h);

// qubit shortcut h_z (m_z + |m|)
double qubit_ergotropy(const BlochVector& b, double h_z);

// time after which the dephased (population) part of a GADC trajectory is passive
double incoherent_vanish_time(double m_z, const Gadc& c);

// m_x >= 0 putting (m_x, 0, m_z) on the isoergotropic paraboloid of level e0 (h_z = 1)
double iso_ergotropic_mx(double e0, double m_z);

// piecewise formula over the six population orderings
double qutrit_table_ergotropy(const QutritDiagonal& q, double h_z);

} // namespace ergoflux
