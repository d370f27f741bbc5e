#include "timeops/timeop.hpp"

namespace timeops {

Index BlockOperator::dimension() const {
  return blocks.empty() ? 0 : offsets.back() + blocks.back().dimension();
}

VectorXd BlockOperator::generator() const {
  VectorXd h(dimension());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    h.segment(offsets[b], blocks[b].dimension()) = blocks[b].generator();
  return h;
}

MatrixXcd BlockOperator::dense() const {
  MatrixXcd t = MatrixXcd::Zero(dimension(), dimension());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Index n = blocks[b].dimension();
    t.block(offsets[b], offsets[b], n, n) = blocks[b].data;
  }
  return t;
}

BlockOperator direct_sum(std::vector<TimeOperatorMatrixd> blocks) {
  BlockOperator op;
  Index offset = 0;
  for (const auto& b : blocks) {
    if (b.data.rows() != b.data.cols() || b.data.rows() != b.eigenvalues.size())
      throw std::invalid_argument("direct_sum: block dimension mismatch");
    op.offsets.push_back(offset);
    offset += b.dimension();
  }
  op.blocks = std::move(blocks);
  return op;
}

double ccr_residual(const BlockOperator& op, const VectorXcd& v) {
  if (v.size() != op.dimension()) throw std::invalid_argument("ccr_residual: dimension mismatch");
  double sq = 0.0;
  for (std::size_t b = 0; b < op.blocks.size(); ++b) {
    const auto& blk = op.blocks[b];
    const VectorXcd part = v.segment(op.offsets[b], blk.dimension());
    // Per-block membership: the CCR domain is the algebraic sum of the block spans.
    const double r = ccr_residual<double>(blk, part);
    sq += r * r;
  }
  return std::sqrt(sq);
}

}  // namespace timeops
