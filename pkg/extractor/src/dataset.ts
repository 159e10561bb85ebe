/** Image folder datasets: ROOT/SPLIT/CLASS_NAME/image.png.
 *
 * Classes are mapped to indices in sorted-name order and images are visited
 * in sorted-filename order, so a dataset directory always produces the same
 * file. Unreadable images are skipped and reported, never fatal.
 */

import { readdirSync, statSync } from 'fs';
import { join } from 'path';

export interface ImageEntry {
  classIndex: number;
  sampleId: string;
  path: string;
}

export interface ImageDataset {
  classNames: string[];
  images: ImageEntry[];
}

export function listImages(root: string, split: string): ImageDataset {
  const splitDir = join(root, split);
  let classDirs: string[];
  try {
    classDirs = readdirSync(splitDir)
      .filter((name) => statSync(join(splitDir, name)).isDirectory())
      .sort();
  } catch (e) {
    throw new Error(`cannot list split directory ${splitDir}: ${(e as Error).message}`);
  }
  if (classDirs.length === 0) throw new Error(`no class directories under ${splitDir}`);

  const images: ImageEntry[] = [];
  classDirs.forEach((className, classIndex) => {
    const dir = join(splitDir, className);
    const files = readdirSync(dir).filter((f) => f.toLowerCase().endsWith('.png')).sort();
    for (const file of files) {
      images.push({ classIndex, sampleId: `${className}/${file}`, path: join(dir, file) });
    }
  });
  if (images.length === 0) throw new Error(`no .png images under ${splitDir}`);
  return { classNames: classDirs, images };
}
