#pragma once

#include <stdexcept>
#include <string>

namespace potsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph construction / attributes
struct InvalidSpec : Error { using Error::Error; };
struct ConnectivityFailure : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };

// static allocation engine
struct InvalidArrival : Error { using Error::Error; };
struct EmptyTrace : Error { using Error::Error; };

// dynamic queueing engine
struct InvalidConfig : Error { using Error::Error; };
struct Unstable : InvalidConfig { using InvalidConfig::InvalidConfig; };
struct NoMeasurement : Error { using Error::Error; };
struct NoDepartures : Error { using Error::Error; };
struct EmptyRecords : Error { using Error::Error; };
struct UntrackedPair : Error { using Error::Error; };
struct InvalidRate : Error { using Error::Error; };

// experiment harness
struct ParseError : Error { using Error::Error; };

}  // namespace potsim
