#pragma once

namespace coplan::vocab {

// Fixed predicate vocabulary used by all triple projections.
inline constexpr const char* isA = "coplan:isA";
inline constexpr const char* inDomain = "coplan:inDomain";
inline constexpr const char* hasAttribute = "coplan:hasAttribute";
inline constexpr const char* hasUnit = "coplan:hasUnit";
inline constexpr const char* hasTopic = "coplan:hasTopic";
inline constexpr const char* hasRole = "coplan:hasRole";
inline constexpr const char* hasRange = "coplan:hasRange";
inline constexpr const char* hasFacet = "coplan:hasFacet";
inline constexpr const char* hasCriterion = "coplan:hasCriterion";
inline constexpr const char* transformInput = "coplan:transformInput";
inline constexpr const char* transformOutput = "coplan:transformOutput";
inline constexpr const char* transformKind = "coplan:transformKind";

// Catalog projection.
inline constexpr const char* hasName = "coplan:hasName";
inline constexpr const char* hasContact = "coplan:hasContact";
inline constexpr const char* softwareType = "coplan:softwareType";
inline constexpr const char* hasLicense = "coplan:hasLicense";
inline constexpr const char* hasApi = "coplan:hasApi";
inline constexpr const char* hasPlatform = "coplan:hasPlatform";
inline constexpr const char* builtinKind = "coplan:builtinKind";
inline constexpr const char* temporalResolution = "coplan:temporalResolution";
inline constexpr const char* spatialResolution = "coplan:spatialResolution";
inline constexpr const char* hasVariable = "coplan:hasVariable";
inline constexpr const char* hasCausality = "coplan:hasCausality";
inline constexpr const char* hasVariability = "coplan:hasVariability";
inline constexpr const char* hasMin = "coplan:hasMin";
inline constexpr const char* hasMax = "coplan:hasMax";
inline constexpr const char* hasStart = "coplan:hasStart";

// Scenario projection.
inline constexpr const char* instanceOf = "coplan:instanceOf";
inline constexpr const char* hasEntity = "coplan:hasEntity";
inline constexpr const char* hasSimulator = "coplan:hasSimulator";
inline constexpr const char* hasConnection = "coplan:hasConnection";
inline constexpr const char* connectsFrom = "coplan:connectsFrom";
inline constexpr const char* connectsTo = "coplan:connectsTo";
inline constexpr const char* timeShifted = "coplan:timeShifted";
inline constexpr const char* hasParam = "coplan:hasParam";
inline constexpr const char* stepSeconds = "coplan:stepSeconds";
inline constexpr const char* baseStepSeconds = "coplan:baseStepSeconds";
inline constexpr const char* ofSimulator = "coplan:ofSimulator";
inline constexpr const char* hasModel = "coplan:hasModel";
inline constexpr const char* transformFactor = "coplan:transformFactor";
inline constexpr const char* transformOffset = "coplan:transformOffset";

// Result projection.
inline constexpr const char* ofEntity = "coplan:ofEntity";
inline constexpr const char* ofVariable = "coplan:ofVariable";
inline constexpr const char* atTime = "coplan:atTime";
inline constexpr const char* hasValue = "coplan:hasValue";

}  // namespace coplan::vocab
