// Thin client for the darkscan service. The extension ships no model;
// every classification goes through POST /v1/classify.
import { isCategory, type Category } from './taxonomy';
import type { Probabilities } from './aggregate';

export const BATCH_SIZE = 64;

export interface ClassifyResult {
  probabilities: Probabilities;
  predicted: Category;
  flagged: Category[];
}

export class ServiceUnreachable extends Error {}

export class ServiceError extends Error {}

export interface HealthStatus {
  status: string;
  backend: string;
}

async function postJson(url: string, body: unknown): Promise<unknown> {
  let resp: Response;
  try {
    resp = await fetch(url, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new ServiceUnreachable(`cannot reach ${url}: ${String(err)}`);
  }
  if (!resp.ok) {
    throw new ServiceError(`${url} returned HTTP ${resp.status}`);
  }
  return resp.json();
}

export async function fetchHealth(endpoint: string): Promise<HealthStatus> {
  let resp: Response;
  try {
    resp = await fetch(`${endpoint}/v1/health`);
  } catch (err) {
    throw new ServiceUnreachable(`cannot reach ${endpoint}: ${String(err)}`);
  }
  if (!resp.ok) {
    throw new ServiceError(`health check returned HTTP ${resp.status}`);
  }
  return (await resp.json()) as HealthStatus;
}

function parseResult(entry: unknown): ClassifyResult {
  const record = entry as {
    probabilities?: Record<string, number>;
    predicted?: string;
    flagged?: string[];
  };
  if (
    !record ||
    typeof record.probabilities !== 'object' ||
    !isCategory(record.predicted) ||
    !Array.isArray(record.flagged)
  ) {
    throw new ServiceError('malformed classify response');
  }
  return {
    probabilities: record.probabilities as Probabilities,
    predicted: record.predicted,
    flagged: record.flagged.filter(isCategory),
  };
}

// Batches run concurrently but land in fixed slots, so results always come
// back in input order no matter which response arrives first.
export async function classifyTexts(
  endpoint: string,
  texts: readonly string[],
  batchSize: number = BATCH_SIZE,
): Promise<ClassifyResult[]> {
  if (texts.length === 0) return [];
  const batches: string[][] = [];
  for (let start = 0; start < texts.length; start += batchSize) {
    batches.push(texts.slice(start, start + batchSize));
  }
  const slots: ClassifyResult[][] = new Array(batches.length);
  await Promise.all(
    batches.map(async (batch, i) => {
      const body = (await postJson(`${endpoint}/v1/classify`, { texts: batch })) as {
        results?: unknown[];
      };
      if (!Array.isArray(body.results) || body.results.length !== batch.length) {
        throw new ServiceError('classify response does not match request size');
      }
      slots[i] = body.results.map(parseResult);
    }),
  );
  return slots.flat();
}
