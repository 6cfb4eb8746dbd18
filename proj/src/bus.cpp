#include "arbsim/bus.hpp"

#include "arbsim/errors.hpp"

namespace arbsim {

void MessageBus::publish(const std::string& topic, double stamp, BusPayload payload) {
  auto it = latest_.find(topic);
  if (it != latest_.end() && stamp < it->second.stamp)
    throw ConfigError("bus stamp regression on topic '" + topic + "'");
  latest_[topic] = BusMessage{topic, stamp, std::move(payload)};
}

const BusMessage* MessageBus::latest(const std::string& topic) const {
  auto it = latest_.find(topic);
  return it == latest_.end() ? nullptr : &it->second;
}

std::optional<double> MessageBus::age(const std::string& topic, double now) const {
  const BusMessage* m = latest(topic);
  if (!m) return std::nullopt;
  return now - m->stamp;
}

}  // namespace arbsim
