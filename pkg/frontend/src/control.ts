// Thin wrappers over the service's HTTP control endpoints.

export interface InitBoxResult {
  ok: boolean;
  applied?: "next-session" | "next-frame";
  error?: string;
}

type Fetch = typeof fetch;

export async function postInitBox(
  baseUrl: string,
  box: { x: number; y: number; w: number; h: number },
  fetchFn: Fetch = fetch,
): Promise<InitBoxResult> {
  const res = await fetchFn(`${baseUrl}/init-box`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(box),
  });
  return (await res.json()) as InitBoxResult;
}

export async function postReset(
  baseUrl: string,
  fetchFn: Fetch = fetch,
): Promise<{ ok: boolean }> {
  const res = await fetchFn(`${baseUrl}/reset`, { method: "POST" });
  return (await res.json()) as { ok: boolean };
}

export async function getHealth(
  baseUrl: string,
  fetchFn: Fetch = fetch,
): Promise<{ state: string }> {
  const res = await fetchFn(`${baseUrl}/health`);
  return (await res.json()) as { state: string };
}

export async function getConfig(
  baseUrl: string,
  fetchFn: Fetch = fetch,
): Promise<Record<string, unknown>> {
  const res = await fetchFn(`${baseUrl}/config`);
  return (await res.json()) as Record<string, unknown>;
}
