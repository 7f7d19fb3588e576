/**
 * Node bindings for the hdcluster density-based clustering pipeline.
 *
 * The heavy lifting runs in the hdcluster CLI (a separate process), so
 * calling {@link fit} never blocks the event loop. Data crosses the
 * process boundary through the CLI's documented file formats: delimited
 * point text in, a labels artifact and condensed-tree JSON out. Number
 * serialization round-trips float64 exactly, so results are bit-identical
 * to invoking the CLI on the same data directly.
 */

import { spawn } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import path from "node:path";

/** Built-in distance metrics understood by the pipeline. */
export type MetricName = "euclidean" | "manhattan" | "chebyshev";

/** Options accepted by {@link fit}; defaults match the CLI's. */
export interface FitOptions {
  /** Neighbor count for core distances, self included (default 5). */
  minSamples?: number;
  /** Smallest cluster size accepted, >= 2 (default 5). */
  minClusterSize?: number;
  /** Distance metric (default "euclidean"). */
  metric?: MetricName;
  /** Permit the hierarchy root itself as a cluster (default false). */
  allowSingleCluster?: boolean;
  /**
   * Command used to launch the pipeline CLI. Defaults to the
   * HDCLUSTER_COMMAND environment variable (whitespace separated) or
   * ["python3", "-m", "hdcluster"].
   */
  command?: readonly string[];
}

/** Condensed cluster tree rows as parallel arrays (CLI export order). */
export interface CondensedRows {
  parent: Int32Array;
  /** Point index when < nPoints, otherwise a cluster id. */
  child: Int32Array;
  /** Inverse-distance scale of the row; Infinity for zero-distance merges. */
  lambdaVal: Float64Array;
  childSize: Int32Array;
}

/** Result of one clustering run. */
export interface FitResult {
  /** Cluster label per input row; -1 marks noise. */
  labels: Int32Array;
  /** Number of selected clusters (labels run 0..nClusters-1). */
  nClusters: number;
  /** The condensed cluster tree behind the labels. */
  condensed: CondensedRows;
}

/** The input or options were rejected (CLI exit code 2). */
export class InvalidInputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "InvalidInputError";
  }
}

/** The pipeline hit an internal invariant violation (CLI exit code 3). */
export class InternalError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "InternalError";
  }
}

function defaultCommand(): readonly string[] {
  const fromEnv = process.env.HDCLUSTER_COMMAND;
  if (fromEnv && fromEnv.trim().length > 0) {
    return fromEnv.trim().split(/\s+/);
  }
  return ["python3", "-m", "hdcluster"];
}

function serializePoints(points: ReadonlyArray<ReadonlyArray<number>>): string {
  if (points.length === 0) {
    throw new InvalidInputError("points must contain at least one row");
  }
  const width = points[0].length;
  if (width === 0) {
    throw new InvalidInputError("points must have at least one coordinate");
  }
  const lines: string[] = new Array(points.length);
  for (let i = 0; i < points.length; i++) {
    const row = points[i];
    if (row.length !== width) {
      throw new InvalidInputError(
        `row ${i} has ${row.length} coordinates, expected ${width}`,
      );
    }
    const cells: string[] = new Array(width);
    for (let j = 0; j < width; j++) {
      const v = row[j];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new InvalidInputError(
          `row ${i}, column ${j}: coordinates must be finite numbers`,
        );
      }
      // String(number) is shortest-round-trip, so the CLI parses back
      // the identical float64.
      cells[j] = String(v);
    }
    lines[i] = cells.join(",");
  }
  return lines.join("\n") + "\n";
}

interface CliOutcome {
  code: number;
  stdout: string;
  stderr: string;
}

function runCli(command: readonly string[], args: string[]): Promise<CliOutcome> {
  return new Promise((resolve, reject) => {
    const child = spawn(command[0], [...command.slice(1), ...args], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let stdout = "";
    let stderr = "";
    child.stdout.on("data", (chunk) => (stdout += chunk));
    child.stderr.on("data", (chunk) => (stderr += chunk));
    child.on("error", reject);
    child.on("close", (code) => resolve({ code: code ?? -1, stdout, stderr }));
  });
}

function throwForExit(outcome: CliOutcome): never {
  const detail = outcome.stderr.trim() || outcome.stdout.trim() || "no diagnostic";
  if (outcome.code === 2) {
    throw new InvalidInputError(detail);
  }
  if (outcome.code === 3) {
    throw new InternalError(detail);
  }
  throw new InternalError(`pipeline exited with code ${outcome.code}: ${detail}`);
}

function parseLabels(text: string): Int32Array {
  const lines = text.split("\n").filter((line) => line.length > 0);
  const labels = new Int32Array(lines.length);
  for (let i = 0; i < lines.length; i++) {
    labels[i] = Number.parseInt(lines[i], 10);
  }
  return labels;
}

interface RawCondensedRow {
  parent: number;
  child: number;
  lambda_val: number | "inf";
  child_size: number;
}

function parseCondensed(text: string): CondensedRows {
  const rows = JSON.parse(text) as RawCondensedRow[];
  const n = rows.length;
  const condensed: CondensedRows = {
    parent: new Int32Array(n),
    child: new Int32Array(n),
    lambdaVal: new Float64Array(n),
    childSize: new Int32Array(n),
  };
  for (let i = 0; i < n; i++) {
    const row = rows[i];
    condensed.parent[i] = row.parent;
    condensed.child[i] = row.child;
    condensed.lambdaVal[i] = row.lambda_val === "inf" ? Infinity : row.lambda_val;
    condensed.childSize[i] = row.child_size;
  }
  return condensed;
}

function parseClusterCount(stdout: string): number {
  const match = stdout.match(/n_clusters=(\d+)/);
  if (!match) {
    throw new InternalError(`could not find n_clusters in summary: ${stdout.trim()}`);
  }
  return Number.parseInt(match[1], 10);
}

/**
 * Cluster a point matrix with the hdcluster pipeline.
 *
 * @param points - Row-per-point coordinates; all rows must share one width
 *   and contain only finite numbers.
 * @param options - Clustering parameters; see {@link FitOptions}.
 * @returns Labels (-1 = noise), the selected cluster count and the
 *   condensed cluster tree, exactly as the CLI would produce for the same
 *   data and parameters.
 * @throws {InvalidInputError} for rejected input or parameters.
 * @throws {InternalError} for pipeline invariant violations.
 */
export async function fit(
  points: ReadonlyArray<ReadonlyArray<number>>,
  options: FitOptions = {},
): Promise<FitResult> {
  const body = serializePoints(points);
  const command = options.command ?? defaultCommand();
  const workDir = await mkdtemp(path.join(tmpdir(), "hdcluster-"));
  try {
    const inputPath = path.join(workDir, "points.csv");
    const labelsPath = path.join(workDir, "labels.txt");
    const treePath = path.join(workDir, "condensed.json");
    await writeFile(inputPath, body, "utf8");
    const args = [
      "cluster",
      "--input", inputPath,
      "--labels-out", labelsPath,
      "--tree-out", treePath,
      "--min-samples", String(options.minSamples ?? 5),
      "--min-cluster-size", String(options.minClusterSize ?? 5),
      "--metric", options.metric ?? "euclidean",
    ];
    if (options.allowSingleCluster) {
      args.push("--allow-single-cluster");
    }
    const outcome = await runCli(command, args);
    if (outcome.code !== 0) {
      throwForExit(outcome);
    }
    const [labelsText, treeText] = await Promise.all([
      readFile(labelsPath, "utf8"),
      readFile(treePath, "utf8"),
    ]);
    return {
      labels: parseLabels(labelsText),
      nClusters: parseClusterCount(outcome.stdout),
      condensed: parseCondensed(treeText),
    };
  } finally {
    await rm(workDir, { recursive: true, force: true });
  }
}
