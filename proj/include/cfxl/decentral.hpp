#ifndef CFXL_DECENTRAL_HPP
#define CFXL_DECENTRAL_HPP

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cfxl/afp.hpp"

namespace cfxl {

enum class Direction { ApToCpu, CpuToAp };

enum class PayloadKind {
  WH_vectors,       // {W_i h_{i,k}}_k            : K*N complex scalars
  WWH_matrix,       // W_i W_i^H                  : N^2
  Omega_matrix,     // Omega_i                    : N^2
  ThetaWH_scalars,  // {theta_{i,k}^H W_i h_{i,k}}: K
  Gamma_scalars,    // {gamma_k}                  : K
  Theta_subvectors, // {theta_{i,k}}_k            : K*N
  CrossAp_scalars,  // cross-AP couplings         : booked as K*(L-1)
};

const char* payload_kind_name(PayloadKind kind);
int payload_scalar_count(PayloadKind kind, int K, int L, int N);

// One ledger entry; the payload data itself moves through typed in-process
// calls (ordered, lossless), since the artifact measures overhead rather than
// transport behavior.
struct Message {
  Direction direction = Direction::ApToCpu;
  int ap_index = 0;
  int iteration = 0;  // outer iteration; 0 marks the bootstrap report
  PayloadKind kind = PayloadKind::WH_vectors;
  int complex_scalar_count = 0;
};

// (uplink, downlink) complex scalars per AP per outer iteration; both are
// independent of the antenna count M.
std::pair<long long, long long> expected_overhead(int K, int L, int N);

struct OverheadReport {
  struct Row {
    int iteration = 0;
    int ap = 0;
    long long uplink_scalars = 0;
    long long downlink_scalars = 0;
  };
  std::vector<Row> rows;                    // outer iterations >= 1
  long long bootstrap_uplink_scalars = 0;   // one-time initial state reports
  long long total_uplink = 0;
  long long total_downlink = 0;
};

OverheadReport overhead_from_messages(const std::vector<Message>& log, int L);

// Columns: iteration,direction,ap,payload_kind,complex_scalars.
void messages_to_csv(const std::vector<Message>& log, std::ostream& os);

// AP-side state for the decentralized sweep. Holds only this AP's channel;
// there is no access path to any other AP's CSI.
class ApNode {
 public:
  ApNode(int index, const arma::cx_mat& H_i, const arma::vec& p, double sigma_z2, double C_F,
         ApProcessing init);

  int index() const { return index_; }
  const ApProcessing& state() const { return state_; }
  const arma::cx_mat& received_covariance() const { return S_; }

  // Initial feasibility repair, mirroring the centralized entry check.
  void project_initial(const AfpConfig& cfg);

  arma::cx_mat local_sigma() const;  // W S W^H + Omega from local state
  ApReport report() const;           // the (V, G, Omega) uplink payload
  // {theta_{i,k}^H W_i h_{i,k}}_k for relaying to the other APs.
  arma::cx_rowvec theta_wh_scalars(const arma::cx_mat& theta_i) const;

  // Per-AP subproblem: Eq.-style coefficient assembly from local CSI plus the
  // received auxiliaries, inner primal-dual loop, feasibility projection.
  // Returns the inner iteration count.
  int update(const arma::vec& gamma, const arma::cx_mat& theta_i, const arma::cx_mat& alpha,
             const AfpConfig& cfg);

  double local_fronthaul_usage() const;

  // Test hook for the isolation property; recomputes the local covariance.
  void set_channel(const arma::cx_mat& H_i);

 private:
  int index_;
  arma::cx_mat H_;  // local CSI only
  arma::vec p_;
  double sigma_z2_;
  double C_F_;
  arma::cx_mat S_;
  ApProcessing state_;
};

// CPU-side state: per-AP reports plus the auxiliary variables computed from
// them. Never sees a channel matrix.
class CpuNode {
 public:
  CpuNode(int L, int N, const arma::vec& p, double sigma_z2);

  void receive_report(int i, ApReport report);
  void receive_theta_wh(int i, arma::cx_rowvec scalars);

  void compute_aux();                    // gamma and theta from the reports
  const arma::vec& gamma() const { return gamma_; }
  arma::cx_mat theta_block(int i) const;               // theta_{i,.}, N x K
  arma::cx_mat cross_couplings_for(int i) const;       // K x K alpha matrix

  double sum_rate() const;
  double max_fronthaul_violation(double C_F) const;    // from reports only

 private:
  int L_;
  int N_;
  arma::vec p_;
  double sigma_z2_;
  std::vector<ApReport> reports_;
  std::vector<arma::cx_rowvec> theta_wh_;
  arma::vec gamma_;
  arma::cx_mat theta_;
};

struct DecentralResult {
  Solution solution;
  ConvergenceTrace trace;
  OverheadReport overhead;
  std::vector<Message> messages;
  bool truncated = false;
};

// Decentralized execution of the accelerated FP sweep: produces the same
// iterate sequence as run_afp for identical inputs, while exchanging only the
// per-AP payloads enumerated above.
DecentralResult run_decentralized(const SystemParams& params, const ChannelRealization& chan,
                                  const Solution& init, const AfpConfig& cfg);

}  // namespace cfxl

#endif  // CFXL_DECENTRAL_HPP
