#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "arbsim/types.hpp"

namespace arbsim {

// In-process stand-in for the topic graph: latest-value semantics with
// per-topic stamps so subscribers can observe staleness. Stamps carry the
// capture time of the payload, which for held/delayed scans lags publish time.
using BusPayload = std::variant<LidarScan, VehicleState, AckermannCommand>;

struct BusMessage {
  std::string topic;
  double stamp = 0.0;
  BusPayload payload;
};

namespace topics {
inline constexpr const char* kScan = "scan";
inline constexpr const char* kScanImpaired = "scan_imp";
inline constexpr const char* kEgoOdom = "ego_odom";
inline constexpr const char* kOppOdom = "opp_odom";
inline constexpr const char* kDrive = "drive";
}  // namespace topics

class MessageBus {
 public:
  void publish(const std::string& topic, double stamp, BusPayload payload);

  const BusMessage* latest(const std::string& topic) const;

  // age of the newest message as seen now; nullopt if never published
  std::optional<double> age(const std::string& topic, double now) const;

  template <typename T>
  const T* latest_as(const std::string& topic) const {
    const BusMessage* m = latest(topic);
    return m ? std::get_if<T>(&m->payload) : nullptr;
  }

  void clear() { latest_.clear(); }

 private:
  std::map<std::string, BusMessage> latest_;
};

}  // namespace arbsim
