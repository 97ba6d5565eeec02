#pragma once

#include <json.hpp>

#include "qtube/certificate.hpp"
#include "qtube/oracle.hpp"
#include "qtube/parabolic.hpp"
#include "qtube/radial.hpp"

namespace qtube {

nlohmann::json to_json(const TubeSpec& t);
nlohmann::json to_json(const RadialMode& m);
nlohmann::json to_json(const SpectrumEstimate& s);
nlohmann::json to_json(const EssentialFloor& f);
nlohmann::json to_json(const CertificateIntegral& c);
nlohmann::json to_json(const QBreakdown& q);
nlohmann::json to_json(const PerturbationResult& p);
nlohmann::json to_json(const VolumeGrowth& v);
nlohmann::json to_json(const EndProfile& e);
nlohmann::json to_json(const CertificateReport& r);

}  // namespace qtube
