#ifndef MEDSTREAM_CSV_HPP
#define MEDSTREAM_CSV_HPP

#include <istream>
#include <string>

#include "medstream/engine.hpp"

namespace medstream {

// Parses one batch file. The header must read exactly
//   Y,X,M1,...,Mp,Z1,...,Zq
// for the configured p and q; extra or reordered columns are rejected rather
// than ignored. Values are plain decimal numbers (UTF-8, '.' decimal point,
// no thousands separators). Errors carry 1-based line numbers counting the
// header as line 1.
RawBatch parse_batch_csv(std::istream& in, const ModelDims& dims, ModelKind model);

RawBatch parse_batch_csv_file(const std::string& path, const ModelDims& dims, ModelKind model);

}  // namespace medstream

#endif  // MEDSTREAM_CSV_HPP
