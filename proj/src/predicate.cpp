#include "depdisc/predicate.hpp"

namespace depdisc {

const char* pred_op_symbol(PredOp op) {
  switch (op) {
    case PredOp::eq: return "==";
    case PredOp::ne: return "!=";
    case PredOp::lt: return "<";
    case PredOp::le: return "<=";
    case PredOp::gt: return ">";
    case PredOp::ge: return ">=";
  }
  return "?";
}

PredicateSpace PredicateSpace::make(SpaceMode mode, const Relation& r) {
  PredicateSpace space;
  space.mode_ = mode;
  space.attribute_base_.resize(r.column_count());
  space.attribute_numeric_.resize(r.column_count());
  for (uint32_t a = 0; a < r.column_count(); ++a) {
    space.attribute_base_[a] = static_cast<uint32_t>(space.predicates_.size());
    bool numeric = r.column(a).kind == ColumnKind::numeric;
    space.attribute_numeric_[a] = numeric;
    if (mode == SpaceMode::fd_inequality) {
      space.predicates_.push_back({a, PredOp::ne});
    } else if (numeric) {
      for (PredOp op : {PredOp::eq, PredOp::ne, PredOp::lt, PredOp::le,
                        PredOp::gt, PredOp::ge}) {
        space.predicates_.push_back({a, op});
      }
    } else {
      space.predicates_.push_back({a, PredOp::eq});
      space.predicates_.push_back({a, PredOp::ne});
    }
  }
  return space;
}

uint32_t PredicateSpace::position(const Predicate& p) const {
  if (p.attribute >= attribute_base_.size())
    throw ContractError("predicate attribute out of range");
  uint32_t base = attribute_base_[p.attribute];
  if (mode_ == SpaceMode::fd_inequality) {
    if (p.op != PredOp::ne) throw ContractError("fd space holds only != predicates");
    return base;
  }
  if (attribute_numeric_[p.attribute])
    return base + static_cast<uint32_t>(p.op);
  if (p.op == PredOp::eq) return base;
  if (p.op == PredOp::ne) return base + 1;
  throw ContractError("order predicate on categorical attribute");
}

bool predicate_satisfied(const Column& column, uint32_t code_i, uint32_t code_j,
                         PredOp op) {
  const bool null_i = column.code_is_null(code_i);
  const bool null_j = column.code_is_null(code_j);
  if (null_i || null_j) {
    // Nulls take part in equality only. Distinct null codes (null-unequal
    // loading) never compare equal.
    const bool equal = null_i && null_j && code_i == code_j;
    switch (op) {
      case PredOp::eq: return equal;
      case PredOp::ne: return !equal;
      case PredOp::le:
      case PredOp::ge: return equal;
      case PredOp::lt:
      case PredOp::gt: return false;
    }
    return false;
  }
  switch (op) {
    case PredOp::eq: return code_i == code_j;
    case PredOp::ne: return code_i != code_j;
    case PredOp::lt: return code_i < code_j;
    case PredOp::le: return code_i <= code_j;
    case PredOp::gt: return code_i > code_j;
    case PredOp::ge: return code_i >= code_j;
  }
  return false;
}

}  // namespace depdisc
