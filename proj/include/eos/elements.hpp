#ifndef EOS_ELEMENTS_HPP
#define EOS_ELEMENTS_HPP

#include <array>
#include <memory>

#include <Eigen/Dense>

#include "eos/config.hpp"
#include "eos/constants.hpp"

namespace eos {

struct ProbeMatrixElements {
    cplx l1, l2;
    double l11 = 0.0, l22 = 0.0;
    cplx l12, m, k11, k22;
    double x = 0.0;
};

// basis order |00>, |10>, |01>, |11>, |20>, |02>
using ProbeState = Eigen::Matrix<cplx, 6, 6>;

struct ElementOptions {
    double rel_tol = 1e-6;        // outer frequency integral
    double inner_rel_tol = 1e-8;  // transverse integral at one frequency
    int nodes_per_period = 10;
    int max_intervals = 20000;
};

// Prefactor C·N_d applied to every second-order element: the physical value
// when a scale block is given, otherwise the configured coupling.
double element_prefactor(const ExperimentConfig& cfg);

// Per-frequency transverse integrals ∫dq of the angular-reduced kernel:
// [0] at zero separation, [1] at the configured separation.
std::array<cplx, 2> transverse_integrals(const ExperimentConfig& cfg, double omega,
                                         const ElementOptions& opt = {});

ProbeMatrixElements vacuum_elements(const ExperimentConfig& cfg, const ElementOptions& opt = {});
ProbeMatrixElements thermal_elements(const ExperimentConfig& cfg, const ElementOptions& opt = {});
ProbeMatrixElements coherent_elements(const ExperimentConfig& cfg, const ClassicalWaveform& waveform,
                                      const ElementOptions& opt = {});
// adds the classical products of a displacement to an existing element set
ProbeMatrixElements displace(const ProbeMatrixElements& base, cplx l1, cplx l2);

cplx exchange_self(const ExperimentConfig& cfg, const ElementOptions& opt = {});
double x_fourth_order(const ProbeMatrixElements& e);

// multiply the C·N_d prefactor by lambda (first-order entries scale with √lambda)
ProbeMatrixElements scale_elements(const ProbeMatrixElements& e, double lambda);

struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ProbeState assemble_state(const ProbeMatrixElements& e);
// the same matrix without the perturbative-regime check; every moment is
// linear in it, so observables can be read off unscaled elements
ProbeState state_matrix(const ProbeMatrixElements& e);

// Thread-safe memo of element sets keyed by the serialized config (and waveform).
class ElementCache {
public:
    ElementCache();
    ProbeMatrixElements thermal(const ExperimentConfig& cfg, const ElementOptions& opt = {});
    ProbeMatrixElements coherent(const ExperimentConfig& cfg, const ClassicalWaveform& w,
                                 const ElementOptions& opt = {});
    size_t size() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace eos

#endif
