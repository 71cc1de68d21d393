#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace v6transit {

enum class Errc {
  TooShort,
  BadVersion,
  BadIhl,
  InvalidHeader,
  LengthMismatch,
  ParseError,
  Not6to4,
  NotCompatible,
  FamilyMismatch,
  InvalidInner,
  NotTunneled,
  BadChecksum,
  UnknownVersion,
  NoEndpoint,
  UnmappableAddress,
  InvalidTunnel,
  InvalidMap,
  NoRoute,
  InvalidTopology,
  InvalidTraffic,
  FlowMismatch,
  ValidationError,
  FileNotFound,
  BadHex,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::TooShort: return "TooShort";
    case Errc::BadVersion: return "BadVersion";
    case Errc::BadIhl: return "BadIhl";
    case Errc::InvalidHeader: return "InvalidHeader";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::Not6to4: return "Not6to4";
    case Errc::NotCompatible: return "NotCompatible";
    case Errc::FamilyMismatch: return "FamilyMismatch";
    case Errc::InvalidInner: return "InvalidInner";
    case Errc::NotTunneled: return "NotTunneled";
    case Errc::BadChecksum: return "BadChecksum";
    case Errc::UnknownVersion: return "UnknownVersion";
    case Errc::NoEndpoint: return "NoEndpoint";
    case Errc::UnmappableAddress: return "UnmappableAddress";
    case Errc::InvalidTunnel: return "InvalidTunnel";
    case Errc::InvalidMap: return "InvalidMap";
    case Errc::NoRoute: return "NoRoute";
    case Errc::InvalidTopology: return "InvalidTopology";
    case Errc::InvalidTraffic: return "InvalidTraffic";
    case Errc::FlowMismatch: return "FlowMismatch";
    case Errc::ValidationError: return "ValidationError";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::BadHex: return "BadHex";
  }
  return "Unknown";
}

/// Exception carrying a typed error code. what() is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace v6transit
