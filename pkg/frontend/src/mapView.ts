/** Canvas painter: fits the current track's bounding box and draws the
 * render model. A slippy-tile basemap is drawn best-effort behind the track
 * when the adapter yields URLs; everything still works with no network. */

import type { TrackRender } from "./trackRender";

export interface TileSource {
  /** URL for a z/x/y tile, or null to draw no basemap. */
  url(z: number, x: number, y: number): string | null;
}

export const osmTiles: TileSource = {
  url: (z, x, y) => `https://tile.openstreetmap.org/${z}/${x}/${y}.png`,
};

export const noTiles: TileSource = { url: () => null };

interface Viewport {
  minLon: number;
  maxLon: number;
  minLat: number;
  maxLat: number;
}

export class MapView {
  private viewport: Viewport = { minLon: -87.6, maxLon: -84.7, minLat: 37.7, maxLat: 41.8 };
  private tileCache = new Map<string, HTMLImageElement>();

  constructor(
    private canvas: HTMLCanvasElement,
    private tiles: TileSource = noTiles,
  ) {}

  fitTo(lons: number[], lats: number[]): void {
    if (lons.length === 0) return;
    const pad = 0.02;
    this.viewport = {
      minLon: Math.min(...lons) - pad,
      maxLon: Math.max(...lons) + pad,
      minLat: Math.min(...lats) - pad,
      maxLat: Math.max(...lats) + pad,
    };
  }

  private toPixel(lon: number, lat: number): [number, number] {
    const v = this.viewport;
    const x = ((lon - v.minLon) / (v.maxLon - v.minLon)) * this.canvas.width;
    const y = ((v.maxLat - lat) / (v.maxLat - v.minLat)) * this.canvas.height;
    return [x, y];
  }

  draw(render: TrackRender): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.fillStyle = "#dfe8dc";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    this.drawBasemap(ctx);

    ctx.lineWidth = 3;
    ctx.lineCap = "round";
    for (const seg of render.segments) {
      ctx.strokeStyle = seg.color;
      ctx.beginPath();
      ctx.moveTo(...this.toPixel(seg.from[0], seg.from[1]));
      ctx.lineTo(...this.toPixel(seg.to[0], seg.to[1]));
      ctx.stroke();
    }
    if (render.marker) {
      const [x, y] = this.toPixel(render.marker[0], render.marker[1]);
      ctx.fillStyle = "#1668d6";
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, 7, 0, Math.PI * 2);
      ctx.fill();
      ctx.stroke();
    }
  }

  private drawBasemap(ctx: CanvasRenderingContext2D): void {
    const v = this.viewport;
    const zoom = Math.max(3, Math.min(14, Math.round(Math.log2(360 / (v.maxLon - v.minLon)))));
    const n = 2 ** zoom;
    const tileX = (lon: number) => Math.floor(((lon + 180) / 360) * n);
    const latRad = (lat: number) => (lat * Math.PI) / 180;
    const tileY = (lat: number) =>
      Math.floor(((1 - Math.asinh(Math.tan(latRad(lat))) / Math.PI) / 2) * n);
    for (let tx = tileX(v.minLon); tx <= tileX(v.maxLon); tx++) {
      for (let ty = tileY(v.maxLat); ty <= tileY(v.minLat); ty++) {
        const url = this.tiles.url(zoom, tx, ty);
        if (!url) continue;
        const cached = this.tileCache.get(url);
        if (cached && cached.complete && cached.naturalWidth > 0) {
          const lonW = (tx / n) * 360 - 180;
          const lonE = ((tx + 1) / n) * 360 - 180;
          const latN = (Math.atan(Math.sinh(Math.PI * (1 - (2 * ty) / n))) * 180) / Math.PI;
          const latS = (Math.atan(Math.sinh(Math.PI * (1 - (2 * (ty + 1)) / n))) * 180) / Math.PI;
          const [x0, y0] = this.toPixel(lonW, latN);
          const [x1, y1] = this.toPixel(lonE, latS);
          ctx.drawImage(cached, x0, y0, x1 - x0, y1 - y0);
        } else if (!cached) {
          const img = new Image();
          img.crossOrigin = "anonymous";
          img.src = url;
          this.tileCache.set(url, img);
        }
      }
    }
  }
}
