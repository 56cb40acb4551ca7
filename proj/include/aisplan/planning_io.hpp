#pragma once

#include "aisplan/planning.hpp"

#include <string>

namespace aisplan {

/// "%.12g"; inf and nan spelled out.
std::string format_number(double v);

/// CSV columns: stage,key,value,greedy_action,q_0..q_{A-1}
std::string value_tables_csv(const ValueTables& v);
std::string value_tables_json(const ValueTables& v);

/// CSV columns: stage,eps,delta,rho,alpha,policy_bound
std::string bound_report_csv(const BoundReport& r);
std::string bound_report_json(const BoundReport& r);

/// CSV columns: scenario,ais_eps,ais_delta,ais_rho,ais_bound,literature_bound,ratio
std::string comparison_csv(const Comparison& c);
std::string comparison_json(const Comparison& c);

/// CSV columns: stage,eps,delta
std::string certificate_csv(const AisCertificate& c);

} // namespace aisplan
