/** Error types surfaced by the converter. */

export class ConverterError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** The requested data variable does not exist in the input file. */
export class MissingVariableError extends ConverterError {}

/** The monthly time axis has a hole or runs backwards. */
export class CalendarGapError extends ConverterError {}

/** Time steps are not one calendar month apart. */
export class NonMonthlyDataError extends ConverterError {}

/** The climatology baseline years are not covered by the input. */
export class BaselineCoverageError extends ConverterError {}

/** An HQGD or NetCDF byte stream does not match its declared layout. */
export class FormatError extends ConverterError {}

/** A cell required by the index box is missing (land or fill value). */
export class MissingCellsError extends ConverterError {}
