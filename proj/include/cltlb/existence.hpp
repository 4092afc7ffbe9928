#pragma once

#include "cltlb/encoder.hpp"

#include <string>
#include <vector>

namespace cltlb {

// Element of V' for one partition class: a depth-0 variable or a constant.
struct PointRef {
  Term subject;
  int j = 0;
  int h = 0;

  int position() const { return j + h; }
};

enum class PathKind { Lt, Le, Gt, Ge };

// Variables of class `cls` followed by its constants.
std::vector<Term> class_subjects(const VarPartition &p, int cls);

// Symbol of f/b (local = true) or F/B for an ordered subject pair.
std::string path_symbol(PathKind kind, bool local, int cls, const Term &x, const Term &y);

// `partition` may be null only in strong mode, where the single class is
// rebuilt from the context.
std::vector<Assertion> encode_local_relations(const EncodingContext &ctx,
                                              const VarPartition *partition,
                                              ValuationMode mode);
std::vector<Assertion> encode_path_closure(const EncodingContext &ctx,
                                           const VarPartition *partition,
                                           ValuationMode mode);
std::vector<Assertion> encode_existence_condition(const EncodingContext &ctx,
                                                  const VarPartition *partition,
                                                  ValuationMode mode);

// Declares every predicate and appends the three families above.
void encode_existence(const EncodingContext &ctx, SmtScript &script);

} // namespace cltlb
