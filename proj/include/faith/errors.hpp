#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace faith {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or non-canonical group element / scalar / blob encoding.
struct InvalidEncoding : Error {
    explicit InvalidEncoding(const std::string& what) : Error("invalid encoding: " + what) {}
};

// Inverting the zero scalar.
struct ZeroInverse : Error {
    ZeroInverse() : Error("scalar inverse of zero") {}
};

// AEAD tag mismatch while decrypting chunk `index`.
struct AuthFailure : Error {
    explicit AuthFailure(uint64_t index)
        : Error("authentication failure at chunk " + std::to_string(index)), chunk_index(index) {}
    uint64_t chunk_index;
};

// Envelope body shorter than its header declares.
struct TruncationError : Error {
    explicit TruncationError(const std::string& what) : Error("truncated envelope: " + what) {}
};

struct IoError : Error {
    IoError(const std::string& what, uint64_t offset)
        : Error(what + " at byte offset " + std::to_string(offset)), byte_offset(offset) {}
    uint64_t byte_offset;
};

struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id) {}
};

struct DanglingReference : Error {
    explicit DanglingReference(const std::string& id) : Error("dangling reference: " + id) {}
};

struct NotFound : Error {
    explicit NotFound(const std::string& id) : Error("not found: " + id) {}
};

// Prover-side failures (witness does not satisfy the statement, bad params).
struct ProvingError : Error {
    explicit ProvingError(const std::string& what) : Error("proving error: " + what) {}
};

// aggregate_final called with components that disagree with each other.
struct StatementMismatch : Error {
    explicit StatementMismatch(const std::string& what) : Error("statement mismatch: " + what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

}  // namespace faith
