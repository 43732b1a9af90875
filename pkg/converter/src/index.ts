export { ConversionSpec, ConversionResult, DEFAULT_SPEC, convert, convertToFile } from "./convert.js";
export { TargetGrid, STUDY_GRID, gridToJson, latCenters, lonCenters, nLat, nLon, nNodes } from "./grid.js";
export { MonthlyField, YearMonth, checkMonthly, monthIndex, parseTimeAxis, readMonthlyField } from "./netcdf.js";
export { NcAttr, NcDim, NcVar, writeNetCDF3 } from "./netcdf-write.js";
export { RegridResult, edgesFromCenters, regridMonthly } from "./regrid.js";
export { monthlyClimatology, subtractClimatology } from "./climatology.js";
export { boxNodeIndices, computeOni } from "./oni.js";
export { HqgdManifest, HqgdSample, HQGD_MAGIC, HQGD_VERSION, readHqgd, writeHqgd } from "./hqgd.js";
export { VerifyReport, formatReport, verifyFile } from "./verify.js";
export {
  BaselineCoverageError,
  CalendarGapError,
  ConverterError,
  FormatError,
  MissingCellsError,
  MissingVariableError,
  NonMonthlyDataError,
} from "./errors.js";
