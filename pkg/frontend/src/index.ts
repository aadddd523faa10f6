export {
  SchemaError,
  Table,
  column,
  groupBy,
  mean,
  numericColumn,
  parseCsv,
  requireColumns,
  sampleStd,
} from "./csv.js";
export {
  FIGURE_KINDS,
  FigureKind,
  HistogramBin,
  REFERENCES,
  RefLine,
  RenderOptions,
  RenderResult,
  SeriesPoint,
  SeriesSummary,
  renderDocScaling,
  renderFigure,
  renderNDependence,
  renderPhaseHistogram,
  renderSummaryBars,
} from "./figures.js";
export { runCli } from "./cli.js";
