#include "tsf/numkit/errors.hpp"

namespace tsf {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::shape: return "shape error";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::degenerate_series: return "degenerate series";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::version_mismatch: return "version mismatch";
    case ErrorKind::corrupt_payload: return "corrupt payload";
    }
    return "error";
}

void rethrow_with_context(const Error& e, const std::string& prefix) {
    const std::string m = prefix + e.what();
    switch (e.kind()) {
    case ErrorKind::shape: throw ShapeError(m);
    case ErrorKind::argument: throw ArgumentError(m);
    case ErrorKind::degenerate_series: throw DegenerateSeriesError(m);
    case ErrorKind::numeric: throw NumericError(m);
    case ErrorKind::parse: throw ParseError(m);
    case ErrorKind::io: throw IoError(m);
    case ErrorKind::version_mismatch: throw VersionMismatchError(m);
    case ErrorKind::corrupt_payload: throw CorruptPayloadError(m);
    }
    throw Error(e.kind(), m);
}

} // namespace tsf
